#pragma once

#include <cstdint>
#include <string>
#include <tuple>

#include "skillmap/corpus.hpp"

namespace skillmap {

/// Controls the paired synthetic platforms. Both platforms derive their
/// skills from a shared pool of latent skills; a granularity factor of g
/// gives round(latent_skills * g) platform skills, assigned to latents
/// round-robin, so g > 1 splits each latent into several finer skills.
struct SyntheticConfig {
    int latent_skills = 20;
    double granularity_a = 1.0;
    double granularity_b = 1.0;
    int vocabulary_size = 400;
    int students_per_platform = 100;
    int interactions_per_student = 60;
    int problems_per_skill = 6;
    int tokens_per_problem = 20;
    double none_fraction = 0.0;   // fraction of each side's skills with a unique latent
    double topic_stay_prob = 0.85;
    std::string platform_a = "alpha";
    std::string platform_b = "beta";
};

struct SyntheticPair {
    PlatformCorpus corpus_a;
    PlatformCorpus corpus_b;
    EquivalenceSet equivalences;  // direction: a -> b
};

/// Deterministic given seed: same seed, byte-identical corpora.
SyntheticPair generate_synthetic_pair(const SyntheticConfig& config, std::uint64_t seed);

/// Number of none-marked skills per side implied by the config: the
/// smallest n with n >= none_fraction * (matched + n).
int none_skill_count(int matched_skills, double none_fraction);

}  // namespace skillmap
