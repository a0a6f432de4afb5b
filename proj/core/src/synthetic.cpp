#include "skillmap/synthetic.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "skillmap/errors.hpp"

namespace skillmap {

int none_skill_count(int matched_skills, double none_fraction) {
    if (none_fraction <= 0.0) return 0;
    int n = 0;
    while (std::ceil(none_fraction * (matched_skills + n)) > n) ++n;
    return n;
}

namespace {

std::string pad_id(const std::string& prefix, int i, int width = 3) {
    std::ostringstream os;
    os << prefix;
    std::string num = std::to_string(i);
    while (static_cast<int>(num.size()) < width) num = "0" + num;
    os << num;
    return os.str();
}

struct SideLayout {
    std::vector<std::string> skills;        // matched skills first, then none skills
    std::vector<int> skill_latent;          // latent id per skill (none skills get private latents)
    std::vector<std::pair<int, int>> sub_range;  // sub-token range inside the latent block, per skill
    int matched = 0;
    int none = 0;
};

// Partition each latent's fine skills over disjoint sub-ranges of the
// latent token block; coarse (single-skill) latents span the whole block.
SideLayout build_side(const std::string& tag, int latent_skills, double granularity,
                      double none_fraction, int first_private_latent, int block_size) {
    SideLayout side;
    side.matched = static_cast<int>(std::lround(latent_skills * granularity));
    if (side.matched < latent_skills) side.matched = latent_skills;
    side.none = none_skill_count(side.matched, none_fraction);

    std::vector<std::vector<int>> latent_members(latent_skills);
    for (int i = 0; i < side.matched; ++i) latent_members[i % latent_skills].push_back(i);

    side.skills.resize(side.matched + side.none);
    side.skill_latent.resize(side.matched + side.none);
    side.sub_range.resize(side.matched + side.none);
    for (int l = 0; l < latent_skills; ++l) {
        const auto& members = latent_members[l];
        const int m = static_cast<int>(members.size());
        for (int j = 0; j < m; ++j) {
            const int idx = members[j];
            side.skills[idx] = pad_id(tag, idx);
            side.skill_latent[idx] = l;
            const int lo = block_size * j / m;
            const int hi = block_size * (j + 1) / m;
            side.sub_range[idx] = {lo, hi};
        }
    }
    for (int i = 0; i < side.none; ++i) {
        const int idx = side.matched + i;
        side.skills[idx] = pad_id(tag + "none", i);
        side.skill_latent[idx] = first_private_latent + i;
        side.sub_range[idx] = {0, block_size};
    }
    return side;
}

}  // namespace

SyntheticPair generate_synthetic_pair(const SyntheticConfig& cfg, std::uint64_t seed) {
    if (cfg.latent_skills <= 0) throw ConfigError("latent_skills must be positive");
    if (cfg.granularity_a < 1.0 || cfg.granularity_b < 1.0) {
        throw ConfigError("granularity factors must be >= 1");
    }
    if (cfg.none_fraction < 0.0 || cfg.none_fraction >= 1.0) {
        throw ConfigError("none_fraction must lie in [0, 1)");
    }
    if (cfg.students_per_platform <= 0 || cfg.interactions_per_student <= 0 ||
        cfg.problems_per_skill <= 0 || cfg.tokens_per_problem <= 0) {
        throw ConfigError("synthetic counts must be positive");
    }

    // provisional side sizes to dimension the latent pool and token blocks
    const int matched_a = std::max(cfg.latent_skills,
                                   static_cast<int>(std::lround(cfg.latent_skills * cfg.granularity_a)));
    const int matched_b = std::max(cfg.latent_skills,
                                   static_cast<int>(std::lround(cfg.latent_skills * cfg.granularity_b)));
    const int none_a = none_skill_count(matched_a, cfg.none_fraction);
    const int none_b = none_skill_count(matched_b, cfg.none_fraction);
    const int total_latents = cfg.latent_skills + none_a + none_b;
    const int block_size = cfg.vocabulary_size / total_latents;
    if (block_size < 2) {
        throw ConfigError("vocabulary_size " + std::to_string(cfg.vocabulary_size) +
                          " too small for " + std::to_string(total_latents) + " latent topics");
    }

    SideLayout side_a = build_side("A", cfg.latent_skills, cfg.granularity_a, cfg.none_fraction,
                                   cfg.latent_skills, block_size);
    SideLayout side_b = build_side("B", cfg.latent_skills, cfg.granularity_b, cfg.none_fraction,
                                   cfg.latent_skills + side_a.none, block_size);

    std::mt19937_64 rng(seed);

    auto latent_token = [&](int latent, int offset) {
        return pad_id("w", latent * block_size + offset, 5);
    };

    // sample one problem token: mostly the skill's sub-range, sometimes the
    // whole latent block, occasionally anywhere in the vocabulary
    auto sample_token = [&](int latent, std::pair<int, int> sub) {
        const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        if (r < 0.08) {
            return pad_id("w", std::uniform_int_distribution<int>(0, cfg.vocabulary_size - 1)(rng), 5);
        }
        if (r < 0.40) {
            return latent_token(latent, std::uniform_int_distribution<int>(0, block_size - 1)(rng));
        }
        return latent_token(latent, std::uniform_int_distribution<int>(sub.first, sub.second - 1)(rng));
    };

    auto build_corpus = [&](const std::string& platform, const SideLayout& side) {
        std::map<std::string, std::string> texts;
        std::vector<std::vector<std::string>> skill_problems(side.skills.size());
        int problem_counter = 0;
        for (std::size_t si = 0; si < side.skills.size(); ++si) {
            for (int p = 0; p < cfg.problems_per_skill; ++p) {
                std::string pid = pad_id(platform + "_p", problem_counter++, 5);
                std::ostringstream text;
                for (int t = 0; t < cfg.tokens_per_problem; ++t) {
                    if (t) text << ' ';
                    text << sample_token(side.skill_latent[si], side.sub_range[si]);
                }
                texts[pid] = text.str();
                skill_problems[si].push_back(pid);
            }
        }

        // skills of one latent are interchangeable in sequences: the topic
        // process walks latents, the emitted skill is uniform within the latent
        std::vector<std::vector<int>> latent_skill_ids(cfg.latent_skills + side_a.none + side_b.none);
        for (std::size_t si = 0; si < side.skills.size(); ++si) {
            latent_skill_ids[side.skill_latent[si]].push_back(static_cast<int>(si));
        }
        std::vector<int> own_latents;
        for (int l = 0; l < static_cast<int>(latent_skill_ids.size()); ++l) {
            if (!latent_skill_ids[l].empty()) own_latents.push_back(l);
        }

        std::vector<Interaction> interactions;
        std::vector<bool> skill_used(side.skills.size(), false);
        std::int64_t clock = 1600000000;
        for (int s = 0; s < cfg.students_per_platform; ++s) {
            const std::string student = pad_id(platform + "_s", s, 4);
            int latent = own_latents[std::uniform_int_distribution<std::size_t>(0, own_latents.size() - 1)(rng)];
            for (int i = 0; i < cfg.interactions_per_student; ++i) {
                if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= cfg.topic_stay_prob) {
                    latent = own_latents[std::uniform_int_distribution<std::size_t>(0, own_latents.size() - 1)(rng)];
                }
                const auto& members = latent_skill_ids[latent];
                const int si = members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
                const auto& probs = skill_problems[si];
                Interaction it;
                it.student_id = student;
                it.problem_id = probs[std::uniform_int_distribution<std::size_t>(0, probs.size() - 1)(rng)];
                it.skill_ids = {side.skills[si]};
                it.start_time = clock++;
                skill_used[si] = true;
                interactions.push_back(std::move(it));
            }
        }
        // the topic walk can miss skills on small configurations; give each
        // unused skill one interaction so every skill exists on its platform
        for (std::size_t si = 0; si < side.skills.size(); ++si) {
            if (skill_used[si]) continue;
            Interaction it;
            it.student_id = pad_id(platform + "_s",
                                   static_cast<int>(si) % cfg.students_per_platform, 4);
            it.problem_id = skill_problems[si].front();
            it.skill_ids = {side.skills[si]};
            it.start_time = clock++;
            interactions.push_back(std::move(it));
        }
        return make_corpus(platform, std::move(interactions), texts);
    };

    SyntheticPair out;
    out.corpus_a = build_corpus(cfg.platform_a, side_a);
    out.corpus_b = build_corpus(cfg.platform_b, side_b);

    for (int i = 0; i < side_a.matched; ++i) {
        for (int j = 0; j < side_b.matched; ++j) {
            if (side_a.skill_latent[i] == side_b.skill_latent[j]) {
                out.equivalences.pairs.insert({side_a.skills[i], side_b.skills[j]});
            }
        }
    }
    for (int i = 0; i < side_a.none; ++i) {
        out.equivalences.none_skills_src.insert(side_a.skills[side_a.matched + i]);
    }
    for (int j = 0; j < side_b.none; ++j) {
        out.equivalences.none_skills_dst.insert(side_b.skills[side_b.matched + j]);
    }
    out.equivalences.validate();
    return out;
}

}  // namespace skillmap
