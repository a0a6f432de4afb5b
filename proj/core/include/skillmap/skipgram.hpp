#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "skillmap/embedding.hpp"

namespace skillmap {

struct SkipgramHyper {
    int vector_dimension = 50;
    int window_size = 5;
    int min_count = 0;
    int negative_samples = 5;
    int epochs = 5;
    double initial_learning_rate = 0.025;
    std::uint64_t seed = 1;
};

/// Every ordered (center, context) pair within window distance, after
/// dropping tokens below min_count. This is exactly the pair stream the
/// trainer consumes; tests compare it against brute-force enumeration.
std::vector<std::pair<std::string, std::string>> enumerate_context_pairs(
    const std::vector<std::vector<std::string>>& sequences, int window_size, int min_count = 0);

/// Skip-gram with negative sampling, strict mode: single worker, fixed
/// iteration order, fully deterministic given inputs + hyper.seed.
/// Negative sampling uses unigram counts raised to 3/4; the learning rate
/// decays linearly to 1e-4 of its initial value over all training pairs.
/// Returns the center-side embeddings; context_out, when non-null,
/// receives the context-side matrix.
EmbeddingSpace train_skipgram(const std::vector<std::vector<std::string>>& sequences,
                              const SkipgramHyper& hyper, const std::string& space_name = "skipgram",
                              EmbeddingSpace* context_out = nullptr);

}  // namespace skillmap
