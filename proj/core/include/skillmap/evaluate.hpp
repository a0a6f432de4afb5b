#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "skillmap/corpus.hpp"
#include "skillmap/embedding.hpp"
#include "skillmap/translate.hpp"

namespace skillmap {

/// Fraction of truth pairs whose destination appears in the source's
/// top-k predictions. Sources missing from the predictions count their
/// pairs as false negatives.
double recall_at_k(const RankedPredictions& predictions, const EquivalenceSet& truth, int k);

/// Mean over truth-bearing source skills of 1/rank of the first relevant
/// destination; sources whose relevant skills never appear in the ranking
/// contribute 0. The ranking must extend over all destination skills.
double mean_reciprocal_rank(const RankedPredictions& predictions, const EquivalenceSet& truth);

/// Replace every prediction whose similarity falls below the threshold
/// with the reserved NONE prediction.
RankedPredictions apply_none_threshold(const RankedPredictions& predictions, double threshold);

/// None-inclusive recall@k for thresholded predictions: a truth pair is a
/// hit when its destination is in the top k non-NONE entries; a none-
/// marked source is a hit when its top prediction is NONE.
double recall_at_k_with_none(const RankedPredictions& predictions, const EquivalenceSet& truth,
                             int k);

/// The "Ignore" baseline: rank as if every skill were translatable and
/// count each none-marked source as a miss.
double recall_at_k_ignore_baseline(const RankedPredictions& predictions,
                                   const EquivalenceSet& truth, int k);

/// Pick the threshold from the grid that maximizes none-inclusive
/// recall@k on the given (validation) truth. Ties go to the smaller
/// threshold.
double select_none_threshold(const RankedPredictions& predictions, const EquivalenceSet& truth,
                             int k, const std::vector<double>& grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                                                       0.6, 0.7, 0.8, 0.9});

struct AnnotationTable {
    // per item: count of raters per category; every item must have the
    // same rater total
    std::vector<std::vector<int>> ratings;
};

struct FleissKappa {
    double value = 0.0;
    bool degenerate = false;  // chance agreement is 1, kappa undefined
};

FleissKappa fleiss_kappa(const AnnotationTable& table);

// ---- cross-validation harness ----

/// One point of a hyperparameter grid; values keyed by parameter name.
struct HyperSet {
    std::map<std::string, double> values;
    std::string id() const;
};

/// How the harness evaluates one model. build_spaces returns directly
/// comparable spaces when needs_translation is false, otherwise
/// platform-local spaces the harness aligns per training split.
/// build_spaces_labeled, when set, replaces both: the model assembles
/// directly comparable spaces itself from the given training pairs (the
/// concatenated combined representation translates its context part
/// internally); the harness passes only the split's training pairs, so
/// test labels never reach space construction.
struct ModelRunner {
    std::string name;
    bool needs_translation = false;
    bool needs_tuning = false;
    std::vector<HyperSet> grid;  // required when needs_tuning
    std::function<std::pair<EmbeddingSpace, EmbeddingSpace>(const HyperSet&)> build_spaces;
    std::function<std::pair<EmbeddingSpace, EmbeddingSpace>(
        const HyperSet&, const EquivalenceSet& train_pairs, std::uint64_t fit_seed)>
        build_spaces_labeled;
};

struct CrossValidateOptions {
    int folds = 10;
    int inner_folds = 3;
    int k = 5;
    std::uint64_t seed = 1;
    int workers = 1;                    // >1 warms the per-grid-point space cache in parallel
    bool skill_disjoint_folds = false;  // group folds by source skill instead of by pair
    FitOptions fit;
    // observes each outer fold's final artifacts (matrix null when the
    // model needed no outer translation)
    std::function<void(int fold, const TranslationMatrix* matrix, const RankedPredictions&)> on_fold;
};

struct FoldRecord {
    int fold = 0;
    std::string hyper_id;
    double recall = 0.0;
    double mrr = 0.0;
};

struct EvaluationReport {
    std::string model;
    int k = 5;
    std::vector<FoldRecord> folds;
    double mean_recall = 0.0;
    double mean_mrr = 0.0;
    std::string fingerprint;  // seeds, model, grid, fold count

    std::string to_json() const;
    std::string to_table() const;
};

/// Seeded balanced partition of the pairs into `folds` groups; used by the
/// harness and directly testable.
std::vector<std::vector<std::pair<std::string, std::string>>> partition_pairs(
    const EquivalenceSet& pairs, int folds, std::uint64_t seed, bool skill_disjoint = false);

/// Outer k-fold CV over the labeled pairs; models with needs_tuning run
/// an inner CV over each outer-training split and select the grid point
/// with the best mean inner MRR. Models needing neither labels nor tuning
/// are evaluated once against all pairs.
EvaluationReport cross_validate(const ModelRunner& model, const EquivalenceSet& pairs,
                                const CrossValidateOptions& options);

}  // namespace skillmap
