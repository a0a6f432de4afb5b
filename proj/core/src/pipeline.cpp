#include "skillmap/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include "json.hpp"
#include "skillmap/analysis.hpp"
#include "skillmap/errors.hpp"
#include "skillmap/represent.hpp"
#include "skillmap/tamf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace skillmap {

ModelChoice parse_model_choice(const std::string& name) {
    if (name == "bow" || name == "bag_of_words") return ModelChoice::BagOfWords;
    if (name == "tfidf") return ModelChoice::Tfidf;
    if (name == "content2vec") return ModelChoice::Content2vec;
    if (name == "content2vec_external") return ModelChoice::Content2vecExternal;
    if (name == "skill2vec") return ModelChoice::Skill2vec;
    if (name == "concat") return ModelChoice::Concat;
    if (name == "tamf") return ModelChoice::Tamf;
    throw ConfigError("unknown model '" + name + "'");
}

std::string model_choice_name(ModelChoice m) {
    switch (m) {
        case ModelChoice::BagOfWords: return "bow";
        case ModelChoice::Tfidf: return "tfidf";
        case ModelChoice::Content2vec: return "content2vec";
        case ModelChoice::Content2vecExternal: return "content2vec_external";
        case ModelChoice::Skill2vec: return "skill2vec";
        case ModelChoice::Concat: return "concat";
        case ModelChoice::Tamf: return "tamf";
    }
    return "?";
}

void validate_model_availability(ModelChoice model, DataAvailability available) {
    const bool has_content = available != DataAvailability::Context;
    const bool has_context = available != DataAvailability::Content;
    auto fail = [&](const std::string& need) {
        throw ConfigError("model '" + model_choice_name(model) + "' requires " + need +
                          " information, which the platform does not provide");
    };
    switch (model) {
        case ModelChoice::BagOfWords:
        case ModelChoice::Tfidf:
        case ModelChoice::Content2vec:
        case ModelChoice::Content2vecExternal:
            if (!has_content) fail("content");
            break;
        case ModelChoice::Skill2vec:
            if (!has_context) fail("context");
            break;
        case ModelChoice::Concat:
        case ModelChoice::Tamf:
            if (!has_content || !has_context) fail("both content and context");
            break;
    }
}

std::vector<HyperSet> default_grid(ModelChoice model) {
    std::vector<HyperSet> grid;
    switch (model) {
        case ModelChoice::Content2vec:
            for (double dim : {50.0, 100.0})
                for (double window : {10.0, 20.0})
                    for (double mc : {30.0, 50.0})
                        grid.push_back({{{"dim", dim}, {"window", window}, {"min_count", mc}}});
            break;
        case ModelChoice::Skill2vec:
            for (double dim : {50.0, 100.0})
                for (double window : {5.0, 10.0, 20.0})
                    grid.push_back({{{"dim", dim}, {"window", window}}});
            break;
        case ModelChoice::Tamf:
            for (double k : {25.0, 50.0})
                for (double lambda : {0.1, 1.0, 10.0})
                    grid.push_back({{{"k", k}, {"lambda", lambda}}});
            break;
        case ModelChoice::Concat:
            for (double dim : {50.0, 100.0})
                grid.push_back({{{"dim", dim}, {"window", 10.0}, {"min_count", 0.0},
                                 {"context_dim", dim}, {"context_window", 5.0}}});
            break;
        default:
            break;  // label-free models have no grid
    }
    return grid;
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

DataAvailability parse_availability(const std::string& s) {
    if (s == "content") return DataAvailability::Content;
    if (s == "context") return DataAvailability::Context;
    if (s == "both") return DataAvailability::Both;
    throw ConfigError("availability must be content|context|both, got '" + s + "'");
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

PlatformConfig parse_platform(const json& j, const std::string& where) {
    check_keys(j, {"name", "logs", "texts", "available", "model"}, where);
    PlatformConfig p;
    if (!j.contains("name")) throw ConfigError(where + " needs a 'name'");
    p.name = j["name"].get<std::string>();
    if (j.contains("logs")) p.logs_path = j["logs"].get<std::string>();
    if (j.contains("texts")) p.texts_path = j["texts"].get<std::string>();
    if (j.contains("available")) p.available = parse_availability(j["available"].get<std::string>());
    if (j.contains("model")) p.model = parse_model_choice(j["model"].get<std::string>());
    validate_model_availability(p.model, p.available);
    return p;
}

std::vector<HyperSet> parse_grid(const json& j) {
    std::vector<HyperSet> grid;
    for (const auto& entry : j) {
        HyperSet h;
        for (const auto& [key, value] : entry.items()) {
            h.values[key] = value.get<double>();
        }
        grid.push_back(std::move(h));
    }
    return grid;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    check_keys(j,
               {"source", "destination", "pairs", "schema", "preprocess", "external_word_vectors",
                "folds", "inner_folds", "k", "seed", "workers", "strict", "skill_disjoint_folds",
                "none_mode", "output_dir", "analysis_clusters", "grids"},
               origin);

    ExperimentConfig c;
    if (!j.contains("source") || !j.contains("destination")) {
        throw ConfigError(origin + ": 'source' and 'destination' platforms are required");
    }
    c.source = parse_platform(j["source"], origin + ".source");
    c.destination = parse_platform(j["destination"], origin + ".destination");
    if (j.contains("pairs")) c.pairs_path = j["pairs"].get<std::string>();

    if (j.contains("schema")) {
        const json& s = j["schema"];
        check_keys(s, {"student_col", "problem_col", "skill_col", "time_col", "delimiter",
                       "skill_delimiter", "epoch_time"},
                   origin + ".schema");
        if (s.contains("student_col")) c.schema.student_col = s["student_col"].get<std::string>();
        if (s.contains("problem_col")) c.schema.problem_col = s["problem_col"].get<std::string>();
        if (s.contains("skill_col")) c.schema.skill_col = s["skill_col"].get<std::string>();
        if (s.contains("time_col")) c.schema.time_col = s["time_col"].get<std::string>();
        if (s.contains("delimiter")) c.schema.delimiter = s["delimiter"].get<std::string>().at(0);
        if (s.contains("skill_delimiter"))
            c.schema.skill_delimiter = s["skill_delimiter"].get<std::string>().at(0);
        if (s.contains("epoch_time")) c.schema.epoch_time = s["epoch_time"].get<bool>();
    }
    if (j.contains("preprocess")) {
        const json& p = j["preprocess"];
        check_keys(p, {"min_responses_per_skill", "single_skill_only", "stop_words_file"},
                   origin + ".preprocess");
        if (p.contains("min_responses_per_skill"))
            c.preprocess.min_responses_per_skill = p["min_responses_per_skill"].get<std::size_t>();
        if (p.contains("single_skill_only"))
            c.preprocess.single_skill_only = p["single_skill_only"].get<bool>();
        if (p.contains("stop_words_file"))
            c.stop_words_file = p["stop_words_file"].get<std::string>();
    }
    if (j.contains("external_word_vectors"))
        c.external_word_vectors = j["external_word_vectors"].get<std::string>();
    if (j.contains("folds")) c.folds = j["folds"].get<int>();
    if (j.contains("inner_folds")) c.inner_folds = j["inner_folds"].get<int>();
    if (j.contains("k")) c.k = j["k"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("strict")) c.strict = j["strict"].get<bool>();
    if (j.contains("skill_disjoint_folds"))
        c.skill_disjoint_folds = j["skill_disjoint_folds"].get<bool>();
    if (j.contains("none_mode")) {
        const std::string m = j["none_mode"].get<std::string>();
        if (m == "off") c.none_mode = NoneMode::Off;
        else if (m == "threshold") c.none_mode = NoneMode::Threshold;
        else if (m == "ignore") c.none_mode = NoneMode::Ignore;
        else throw ConfigError("none_mode must be off|threshold|ignore, got '" + m + "'");
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("analysis_clusters")) c.analysis_clusters = j["analysis_clusters"].get<int>();
    if (j.contains("grids")) {
        const json& g = j["grids"];
        check_keys(g, {"content2vec", "skill2vec", "tamf"}, origin + ".grids");
        if (g.contains("content2vec")) c.grid_content2vec = parse_grid(g["content2vec"]);
        if (g.contains("skill2vec")) c.grid_skill2vec = parse_grid(g["skill2vec"]);
        if (g.contains("tamf")) c.grid_tamf = parse_grid(g["tamf"]);
    }

    if ((c.source.model == ModelChoice::Concat) != (c.destination.model == ModelChoice::Concat)) {
        throw ConfigError("the concat model must be selected on both sides or neither");
    }
    if (c.folds < 2) throw ConfigError("folds must be >= 2");
    if (c.k < 1) throw ConfigError("k must be >= 1");
    return c;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (ss.str().empty()) throw ConfigError("config '" + path + "' is empty");
    return parse_config_json(ss.str(), path);
}

PreparedData ingest(const ExperimentConfig& config) {
    auto load_side = [&](const PlatformConfig& p, std::uint64_t seq_seed) {
        PlatformCorpus corpus;
        if (p.logs_path.size() > 12 &&
            p.logs_path.compare(p.logs_path.size() - 12, 12, ".corpus.json") == 0) {
            // snapshot produced by an earlier stage or the synthetic generator
            corpus = read_corpus(p.logs_path);
        } else {
            std::vector<Interaction> interactions;
            if (!p.logs_path.empty()) {
                interactions = load_response_logs(p.logs_path, config.schema);
            }
            std::map<std::string, std::string> texts;
            if (!p.texts_path.empty()) {
                texts = load_problem_texts(p.texts_path);
            }
            corpus = make_corpus(p.name, std::move(interactions), texts);
        }
        PreprocessOptions opts = config.preprocess;
        if (!config.stop_words_file.empty()) {
            std::ifstream sw(config.stop_words_file);
            if (!sw) throw ConfigError("cannot open stop word file '" + config.stop_words_file + "'");
            std::string word;
            while (sw >> word) opts.stop_words.push_back(word);
        }
        corpus = preprocess(corpus, opts);
        corpus.sequences = build_skill_sequences(corpus, seq_seed);
        return corpus;
    };

    PreparedData data;
    data.source = load_side(config.source, config.seed * 31 + 1);
    data.destination = load_side(config.destination, config.seed * 31 + 2);
    if (!config.pairs_path.empty()) {
        data.pairs = load_equivalence_pairs(config.pairs_path);
    }
    return data;
}

namespace {

double hv(const HyperSet& h, const std::string& prefix, const std::string& name, double fallback) {
    auto it = h.values.find(prefix + name);
    if (it != h.values.end()) return it->second;
    it = h.values.find(name);
    if (it != h.values.end()) return it->second;
    return fallback;
}

bool shared_space_content(ModelChoice m) {
    return m == ModelChoice::BagOfWords || m == ModelChoice::Tfidf ||
           m == ModelChoice::Content2vec || m == ModelChoice::Content2vecExternal;
}

// memoized builders for everything the model combinations share
struct SpaceFactory {
    const ExperimentConfig& config;
    const PreparedData& data;
    std::string persist_dir;
    std::vector<std::string>* artifact_log = nullptr;

    std::mutex mu;
    std::map<std::string, EmbeddingSpace> word_vector_cache;
    std::map<std::string, std::pair<EmbeddingSpace, EmbeddingSpace>> content_cache;
    std::map<std::string, EmbeddingSpace> context_cache;
    std::map<std::string, EmbeddingSpace> tamf_cache;

    void persist(const EmbeddingSpace& space, const std::string& stem) {
        if (persist_dir.empty()) return;
        const std::string rel = "spaces/" + stem + ".emb";
        const fs::path path = fs::path(persist_dir) / rel;
        fs::create_directories(path.parent_path());
        write_embedding_file(space, path.string());
        if (artifact_log) artifact_log->push_back(rel);
    }

    EmbeddingSpace word_vectors(int dim, int window, int min_count) {
        const std::string key = std::to_string(dim) + "/" + std::to_string(window) + "/" +
                                std::to_string(min_count);
        std::lock_guard<std::mutex> lock(mu);
        auto it = word_vector_cache.find(key);
        if (it == word_vector_cache.end()) {
            SkipgramHyper hyper;
            hyper.vector_dimension = dim;
            hyper.window_size = window;
            hyper.min_count = min_count;
            hyper.seed = config.seed * 131 + fnv1a64(key) % 65521;
            auto sequences = problem_token_sequences(data.source, data.destination);
            it = word_vector_cache
                     .emplace(key, train_skipgram(sequences, hyper, "words." + key))
                     .first;
        }
        return it->second;
    }

    // content spaces come in pairs (joint vocabulary / shared word vectors)
    std::pair<EmbeddingSpace, EmbeddingSpace> content_pair(ModelChoice model, const HyperSet& h) {
        std::string key = model_choice_name(model);
        int dim = 0, window = 0, mc = 0;
        if (model == ModelChoice::Content2vec) {
            dim = static_cast<int>(hv(h, "", "dim", 50));
            window = static_cast<int>(hv(h, "", "window", 10));
            mc = static_cast<int>(hv(h, "", "min_count", 0));
            key += "/" + std::to_string(dim) + "/" + std::to_string(window) + "/" +
                   std::to_string(mc);
        }
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = content_cache.find(key);
            if (it != content_cache.end()) return it->second;
        }
        std::pair<EmbeddingSpace, EmbeddingSpace> result;
        switch (model) {
            case ModelChoice::BagOfWords:
                result = bag_of_words_spaces(data.source, data.destination);
                break;
            case ModelChoice::Tfidf:
                result = tfidf_spaces(data.source, data.destination);
                break;
            case ModelChoice::Content2vec:
                result = content2vec_spaces(data.source, data.destination,
                                            word_vectors(dim, window, mc));
                break;
            case ModelChoice::Content2vecExternal: {
                if (config.external_word_vectors.empty()) {
                    throw ConfigError("content2vec_external requires 'external_word_vectors'");
                }
                result = content2vec_spaces(data.source, data.destination,
                                            load_external_word_vectors(config.external_word_vectors));
                break;
            }
            default:
                throw ConfigError("not a content model: " + model_choice_name(model));
        }
        persist(result.first, data.source.platform_name + "." + key);
        persist(result.second, data.destination.platform_name + "." + key);
        std::lock_guard<std::mutex> lock(mu);
        return content_cache.emplace(key, std::move(result)).first->second;
    }

    EmbeddingSpace skill2vec(const PlatformCorpus& corpus, int dim, int window) {
        const std::string key =
            corpus.platform_name + "/" + std::to_string(dim) + "/" + std::to_string(window);
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = context_cache.find(key);
            if (it != context_cache.end()) return it->second;
        }
        SkipgramHyper hyper;
        hyper.vector_dimension = dim;
        hyper.window_size = window;
        hyper.seed = config.seed * 733 + fnv1a64(key) % 65521;
        EmbeddingSpace space = skill2vec_space(corpus, hyper, config.seed * 31);
        persist(space, key.substr(0, key.find('/')) + ".skill2vec." + std::to_string(dim) + "_" +
                           std::to_string(window));
        std::lock_guard<std::mutex> lock(mu);
        return context_cache.emplace(key, std::move(space)).first->second;
    }

    EmbeddingSpace tamf(const PlatformCorpus& corpus, const EmbeddingSpace& content, int k,
                        double lambda) {
        std::ostringstream os;
        os << corpus.platform_name << "/" << k << "/" << lambda;
        const std::string key = os.str();
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = tamf_cache.find(key);
            if (it != tamf_cache.end()) return it->second;
        }
        // PPMI reuses the default context window
        PpmiMatrix ppmi = build_ppmi(corpus.sequences,
                                     {corpus.skills.begin(), corpus.skills.end()}, 5);
        TamfOptions opts;
        opts.k = k;
        opts.lambda = lambda;
        opts.seed = config.seed * 997 + fnv1a64(key) % 65521;
        TamfResult result = tamf_factorize(ppmi, content, opts, corpus.platform_name + ".tamf");
        persist(result.space, corpus.platform_name + ".tamf." + std::to_string(k));
        std::lock_guard<std::mutex> lock(mu);
        return tamf_cache.emplace(key, std::move(result.space)).first->second;
    }

    EmbeddingSpace side_space(bool is_source, const HyperSet& h) {
        const PlatformConfig& pc = is_source ? config.source : config.destination;
        const PlatformCorpus& corpus = is_source ? data.source : data.destination;
        const std::string prefix = is_source ? "src_" : "dst_";
        switch (pc.model) {
            case ModelChoice::BagOfWords:
            case ModelChoice::Tfidf:
            case ModelChoice::Content2vec:
            case ModelChoice::Content2vecExternal: {
                auto pair = content_pair(pc.model, h);
                return is_source ? pair.first : pair.second;
            }
            case ModelChoice::Skill2vec:
                return skill2vec(corpus, static_cast<int>(hv(h, prefix, "dim", 50)),
                                 static_cast<int>(hv(h, prefix, "window", 5)));
            case ModelChoice::Tamf: {
                auto content = content_pair(ModelChoice::Content2vec, HyperSet{{{"dim", 50},
                                                                                {"window", 10},
                                                                                {"min_count", 0}}});
                return tamf(corpus, is_source ? content.first : content.second,
                            static_cast<int>(hv(h, prefix, "k", 25)), hv(h, prefix, "lambda", 1.0));
            }
            case ModelChoice::Concat:
                throw ConfigError("concat spaces are assembled via the labeled builder");
        }
        throw ConfigError("unreachable model");
    }
};

}  // namespace

ModelRunner make_model_runner(const ExperimentConfig& config, const PreparedData& data,
                              const std::string& persist_dir) {
    auto factory = std::make_shared<SpaceFactory>(config, data, persist_dir);

    ModelRunner runner;
    runner.name = model_choice_name(config.source.model) + "->" +
                  model_choice_name(config.destination.model);

    const ModelChoice sm = config.source.model;
    const ModelChoice dm = config.destination.model;

    if (sm == ModelChoice::Concat) {
        runner.needs_tuning = true;
        runner.grid = config.grid_content2vec.empty() ? default_grid(ModelChoice::Concat)
                                                      : config.grid_content2vec;
        runner.build_spaces_labeled = [factory, &config](const HyperSet& h,
                                                         const EquivalenceSet& train_pairs,
                                                         std::uint64_t fit_seed) {
            auto content = factory->content_pair(ModelChoice::Content2vec, h);
            EmbeddingSpace src_ctx =
                factory->skill2vec(factory->data.source,
                                   static_cast<int>(hv(h, "src_", "context_dim", 50)),
                                   static_cast<int>(hv(h, "src_", "context_window", 5)));
            EmbeddingSpace dst_ctx =
                factory->skill2vec(factory->data.destination,
                                   static_cast<int>(hv(h, "dst_", "context_dim", 50)),
                                   static_cast<int>(hv(h, "dst_", "context_window", 5)));
            FitOptions fit;
            fit.seed = fit_seed;
            TranslationMatrix t = fit_translation(src_ctx, dst_ctx, train_pairs, fit);
            return assemble_concat(content.first, apply_translation(t, src_ctx), content.second,
                                   dst_ctx);
        };
        return runner;
    }

    // symmetric shared-space content models compare directly; everything
    // else goes through a learned translation
    runner.needs_translation = !(sm == dm && shared_space_content(sm));

    const bool src_tuned = sm == ModelChoice::Content2vec || sm == ModelChoice::Skill2vec ||
                           sm == ModelChoice::Tamf;
    const bool dst_tuned = dm == ModelChoice::Content2vec || dm == ModelChoice::Skill2vec ||
                           dm == ModelChoice::Tamf;
    runner.needs_tuning = src_tuned || dst_tuned;
    if (runner.needs_tuning) {
        if (sm == dm) {
            switch (sm) {
                case ModelChoice::Content2vec:
                    runner.grid = config.grid_content2vec.empty() ? default_grid(sm)
                                                                  : config.grid_content2vec;
                    break;
                case ModelChoice::Skill2vec:
                    runner.grid = config.grid_skill2vec.empty() ? default_grid(sm)
                                                                : config.grid_skill2vec;
                    break;
                case ModelChoice::Tamf:
                    runner.grid = config.grid_tamf.empty() ? default_grid(sm) : config.grid_tamf;
                    break;
                default:
                    break;
            }
        } else {
            // asymmetric combinations: tune only via an explicit override
            // grid; otherwise each side runs at its model's default point
            if (!config.grid_skill2vec.empty()) runner.grid = config.grid_skill2vec;
            else if (!config.grid_tamf.empty()) runner.grid = config.grid_tamf;
            else if (!config.grid_content2vec.empty()) runner.grid = config.grid_content2vec;
            else {
                runner.grid = {HyperSet{}};
            }
        }
    }

    runner.build_spaces = [factory](const HyperSet& h) {
        return std::make_pair(factory->side_space(true, h), factory->side_space(false, h));
    };
    return runner;
}

NoneEvaluation evaluate_none_handling(const RankedPredictions& ranking,
                                      const EquivalenceSet& train_truth,
                                      const EquivalenceSet& test_truth, int k,
                                      const std::vector<double>& grid) {
    NoneEvaluation out;
    out.chosen_threshold = select_none_threshold(ranking, train_truth, k, grid);
    out.threshold_recall = recall_at_k_with_none(
        apply_none_threshold(ranking, out.chosen_threshold), test_truth, k);
    out.ignore_recall = recall_at_k_ignore_baseline(ranking, test_truth, k);
    return out;
}

void write_corpus(const PlatformCorpus& corpus, const std::string& path) {
    json j;
    j["platform_name"] = corpus.platform_name;
    j["skills"] = corpus.skills;
    j["problems"] = json::array();
    for (const auto& [id, p] : corpus.problems) {
        j["problems"].push_back({{"problem_id", id}, {"raw_text", p.raw_text}, {"tokens", p.tokens}});
    }
    j["skill_to_problems"] = json::object();
    for (const auto& [skill, probs] : corpus.skill_to_problems) {
        j["skill_to_problems"][skill] = probs;
    }
    j["interactions"] = json::array();
    for (const auto& it : corpus.interactions) {
        j["interactions"].push_back({{"student_id", it.student_id},
                                     {"problem_id", it.problem_id},
                                     {"skill_ids", it.skill_ids},
                                     {"start_time", it.start_time}});
    }
    j["sequences"] = corpus.sequences;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << j.dump() << '\n';
}

PlatformCorpus read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("corpus '" + path + "': " + e.what());
    }
    PlatformCorpus c;
    c.platform_name = j["platform_name"].get<std::string>();
    for (const auto& s : j["skills"]) c.skills.insert(s.get<std::string>());
    for (const auto& p : j["problems"]) {
        Problem problem;
        problem.problem_id = p["problem_id"].get<std::string>();
        problem.raw_text = p["raw_text"].get<std::string>();
        problem.tokens = p["tokens"].get<std::vector<std::string>>();
        c.problems[problem.problem_id] = std::move(problem);
    }
    for (const auto& [skill, probs] : j["skill_to_problems"].items()) {
        for (const auto& pid : probs) c.skill_to_problems[skill].insert(pid.get<std::string>());
    }
    std::size_t row = 0;
    for (const auto& i : j["interactions"]) {
        Interaction it;
        it.student_id = i["student_id"].get<std::string>();
        it.problem_id = i["problem_id"].get<std::string>();
        it.skill_ids = i["skill_ids"].get<std::vector<std::string>>();
        it.start_time = i["start_time"].get<std::int64_t>();
        it.row_index = row++;
        c.interactions.push_back(std::move(it));
    }
    c.sequences = j["sequences"].get<std::vector<std::vector<std::string>>>();
    return c;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "' for hashing");
    std::uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

PipelineResult run_pipeline(const ExperimentConfig& config) {
    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);
    fs::create_directories(out_dir / "translations");
    fs::create_directories(out_dir / "predictions");

    std::vector<std::string> artifacts;
    auto add_artifact = [&](const std::string& rel) { artifacts.push_back(rel); };

    PreparedData data = ingest(config);
    write_corpus(data.source, (out_dir / "source.corpus.json").string());
    add_artifact("source.corpus.json");
    write_corpus(data.destination, (out_dir / "destination.corpus.json").string());
    add_artifact("destination.corpus.json");

    auto factory_runner = make_model_runner(config, data, config.output_dir);
    // artifact log for spaces persisted on demand
    // (make_model_runner persists via its internal factory; collect afterwards)

    CrossValidateOptions cv;
    cv.folds = config.folds;
    cv.inner_folds = config.inner_folds;
    cv.k = config.k;
    cv.seed = config.seed;
    cv.workers = config.strict ? 1 : config.workers;
    cv.skill_disjoint_folds = config.skill_disjoint_folds;
    cv.on_fold = [&](int fold, const TranslationMatrix* matrix, const RankedPredictions& ranking) {
        if (matrix) {
            const std::string rel = "translations/fold" + std::to_string(fold) + ".txt";
            write_translation_matrix(*matrix, (out_dir / rel).string());
            add_artifact(rel);
        }
        const std::string rel = "predictions/fold" + std::to_string(fold) + ".csv";
        write_predictions(ranking, (out_dir / rel).string());
        add_artifact(rel);
    };

    PipelineResult result;
    result.report = cross_validate(factory_runner, data.pairs, cv);

    {
        std::ofstream report_json(out_dir / "report.json");
        report_json << result.report.to_json() << '\n';
        add_artifact("report.json");
        std::ofstream report_txt(out_dir / "report.txt");
        report_txt << result.report.to_table();
        add_artifact("report.txt");
    }

    if (config.none_mode != NoneMode::Off) {
        // single seeded 80/20 split over pairs and none-marked skills
        std::mt19937_64 rng(config.seed * 51 + 7);
        auto split = [&](const std::set<std::string>& items) {
            std::vector<std::string> v(items.begin(), items.end());
            std::shuffle(v.begin(), v.end(), rng);
            const std::size_t n_test = std::max<std::size_t>(1, v.size() / 5);
            return std::make_pair(std::set<std::string>(v.begin(), v.end() - n_test),
                                  std::set<std::string>(v.end() - n_test, v.end()));
        };
        std::vector<std::pair<std::string, std::string>> pv(data.pairs.pairs.begin(),
                                                            data.pairs.pairs.end());
        std::shuffle(pv.begin(), pv.end(), rng);
        const std::size_t n_test = std::max<std::size_t>(1, pv.size() / 5);
        EquivalenceSet train, test;
        train.pairs.insert(pv.begin(), pv.end() - n_test);
        test.pairs.insert(pv.end() - n_test, pv.end());
        auto [none_train, none_test] = split(data.pairs.none_skills_src);
        train.none_skills_src = none_train;
        test.none_skills_src = none_test;

        const HyperSet h = factory_runner.grid.empty() ? HyperSet{} : factory_runner.grid.front();
        RankedPredictions ranking;
        if (factory_runner.build_spaces_labeled) {
            auto [src, dst] = factory_runner.build_spaces_labeled(h, train, config.seed * 7919);
            ranking = rank_equivalents(src, dst, static_cast<int>(dst.size()));
        } else {
            auto [src, dst] = factory_runner.build_spaces(h);
            if (factory_runner.needs_translation) {
                FitOptions fit;
                fit.seed = config.seed * 7919;
                TranslationMatrix t = fit_translation(src, dst, train, fit);
                src = apply_translation(t, src);
            }
            ranking = rank_equivalents(src, dst, static_cast<int>(dst.size()));
        }
        result.none_evaluation = evaluate_none_handling(ranking, train, test, config.k);

        json nj;
        nj["chosen_threshold"] = result.none_evaluation->chosen_threshold;
        nj["threshold_recall_at_k"] = result.none_evaluation->threshold_recall;
        nj["ignore_recall_at_k"] = result.none_evaluation->ignore_recall;
        std::ofstream none_json(out_dir / "none_report.json");
        none_json << nj.dump(2) << '\n';
        add_artifact("none_report.json");
    }

    // everything under spaces/ was persisted on demand by the factory
    if (fs::exists(out_dir / "spaces")) {
        for (const auto& entry : fs::recursive_directory_iterator(out_dir / "spaces")) {
            if (entry.is_regular_file()) {
                add_artifact(fs::relative(entry.path(), out_dir).generic_string());
            }
        }
    }

    std::sort(artifacts.begin(), artifacts.end());
    artifacts.erase(std::unique(artifacts.begin(), artifacts.end()), artifacts.end());

    json manifest;
    manifest["seed"] = config.seed;
    manifest["strict"] = config.strict;
    manifest["fingerprint"] = result.report.fingerprint;
    manifest["files"] = json::array();
    for (const auto& rel : artifacts) {
        char hex[32];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file((out_dir / rel).string())));
        manifest["files"].push_back({{"path", rel}, {"fnv1a64", hex}});
    }
    {
        std::ofstream mf(out_dir / "manifest.json");
        mf << manifest.dump(2) << '\n';
    }
    result.artifact_files = std::move(artifacts);
    return result;
}

}  // namespace skillmap
