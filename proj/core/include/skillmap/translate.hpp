#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "skillmap/corpus.hpp"
#include "skillmap/embedding.hpp"

namespace skillmap {

struct TranslationMatrix {
    Eigen::MatrixXd matrix;  // m x n, source dim n -> destination dim m
    std::string source_space_name;
    std::string destination_space_name;
    int epochs_run = 0;
    double best_validation_loss = 0.0;
};

struct FitOptions {
    double learning_rate = 0.001;
    int max_epochs = 1000;
    int patience = 100;             // epochs without validation improvement before stopping
    double validation_fraction = 0.2;
    std::uint64_t seed = 1;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Full-batch Adam on the mean cosine distance of translated source
/// vectors to their ground-truth destination vectors; 20% of the pairs
/// (seeded split) are held out and the matrix with the smallest
/// validation loss is returned.
TranslationMatrix fit_translation(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                                  const EquivalenceSet& train_pairs, const FitOptions& opts = {});

EmbeddingSpace apply_translation(const TranslationMatrix& t, const EmbeddingSpace& space);

void write_translation_matrix(const TranslationMatrix& t, const std::string& path);
TranslationMatrix read_translation_matrix(const std::string& path);

/// Reserved destination identifier emitted by the none-threshold mode.
inline const std::string kNonePrediction = "NONE";

struct RankedPredictions {
    // per source skill: (destination skill, cosine), descending similarity,
    // ties broken by ascending destination identifier
    std::map<std::string, std::vector<std::pair<std::string, double>>> ranking;
    int k = 0;
    std::vector<std::string> excluded_zero_vectors;  // skills skipped on either side
};

/// Cosine of every source skill against every destination skill, top-k
/// kept (all of them when k exceeds the destination count). Zero-vector
/// skills on either side are excluded and reported.
RankedPredictions rank_equivalents(const EmbeddingSpace& src, const EmbeddingSpace& dst, int k);

void write_predictions(const RankedPredictions& predictions, const std::string& path,
                       char delimiter = ',');

}  // namespace skillmap
