#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skillmap/corpus.hpp"
#include "skillmap/evaluate.hpp"
#include "skillmap/synthetic.hpp"

namespace skillmap {

enum class ModelChoice {
    BagOfWords,
    Tfidf,
    Content2vec,          // own word vectors trained on pooled problem texts
    Content2vecExternal,  // pretrained word vectors loaded from file
    Skill2vec,
    Concat,  // Content2vec + translated Skill2vec
    Tamf,
};

ModelChoice parse_model_choice(const std::string& name);
std::string model_choice_name(ModelChoice m);

enum class DataAvailability { Content, Context, Both };

struct PlatformConfig {
    std::string name;
    std::string logs_path;
    std::string texts_path;
    DataAvailability available = DataAvailability::Both;
    ModelChoice model = ModelChoice::Content2vec;
};

enum class NoneMode { Off, Threshold, Ignore };

struct ExperimentConfig {
    PlatformConfig source;
    PlatformConfig destination;
    std::string pairs_path;
    LogSchema schema;
    PreprocessOptions preprocess;
    std::string stop_words_file;
    std::string external_word_vectors;
    int folds = 10;
    int inner_folds = 3;
    int k = 5;
    std::uint64_t seed = 1;
    int workers = 1;
    bool strict = false;
    bool skill_disjoint_folds = false;
    NoneMode none_mode = NoneMode::Off;
    std::string output_dir = "out";
    int analysis_clusters = 20;
    // grid overrides; empty means the built-in defaults for the model
    std::vector<HyperSet> grid_content2vec;
    std::vector<HyperSet> grid_skill2vec;
    std::vector<HyperSet> grid_tamf;
};

/// Parse and validate a JSON config file. Unknown keys and
/// model/availability mismatches are rejected.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& json_text, const std::string& origin = "config");

/// Model/data compatibility per the content-context availability matrix;
/// throws ConfigError on violation.
void validate_model_availability(ModelChoice model, DataAvailability available);

std::vector<HyperSet> default_grid(ModelChoice model);

struct NoneEvaluation {
    double chosen_threshold = 0.0;
    double threshold_recall = 0.0;  // none-inclusive recall@k, threshold mode
    double ignore_recall = 0.0;     // "Ignore" baseline recall@k
};

/// Threshold selection on the training truth, evaluation on the test truth.
NoneEvaluation evaluate_none_handling(const RankedPredictions& ranking,
                                      const EquivalenceSet& train_truth,
                                      const EquivalenceSet& test_truth, int k,
                                      const std::vector<double>& grid = {0.1, 0.2, 0.3, 0.4, 0.5,
                                                                         0.6, 0.7, 0.8, 0.9});

struct PipelineResult {
    EvaluationReport report;
    std::optional<NoneEvaluation> none_evaluation;
    std::vector<std::string> artifact_files;  // relative to output_dir, manifest excluded
};

/// Load a prepared pair of corpora (already preprocessed, sequences built).
struct PreparedData {
    PlatformCorpus source;
    PlatformCorpus destination;
    EquivalenceSet pairs;
};

PreparedData ingest(const ExperimentConfig& config);

/// Build the ModelRunner the cross-validation harness consumes for this
/// config; spaces built on demand are also persisted under output_dir
/// when persist_dir is non-empty.
ModelRunner make_model_runner(const ExperimentConfig& config, const PreparedData& data,
                              const std::string& persist_dir = "");

/// Full pipeline: ingestion, representation, translation, ranking,
/// evaluation; persists artifacts and a manifest under output_dir.
PipelineResult run_pipeline(const ExperimentConfig& config);

/// Corpus snapshot (skills, problems with tokens, interactions, sequences)
/// as JSON; lets pipeline stages compose across CLI invocations.
void write_corpus(const PlatformCorpus& corpus, const std::string& path);
PlatformCorpus read_corpus(const std::string& path);

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace skillmap
