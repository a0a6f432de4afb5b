// Command line front end for the skill alignment pipeline. Subcommands
// mirror the pipeline stages so they can be composed via files, and `run`
// executes the whole experiment from one config.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "skillmap/analysis.hpp"
#include "skillmap/errors.hpp"
#include "skillmap/evaluate.hpp"
#include "skillmap/pipeline.hpp"
#include "skillmap/represent.hpp"
#include "skillmap/synthetic.hpp"
#include "skillmap/translate.hpp"

namespace fs = std::filesystem;
using namespace skillmap;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* c = cmd->add_option("--config", flags.config_path, "experiment config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--out", flags.out, "override the output directory");
    cmd->add_option("--workers", flags.workers, "override the worker count");
    cmd->add_flag("--strict", flags.strict, "fully deterministic single-worker mode");
}

// flag > config > default
ExperimentConfig load_config(const CommonFlags& flags) {
    ExperimentConfig config = parse_config(flags.config_path);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out) config.output_dir = *flags.out;
    if (flags.workers) config.workers = *flags.workers;
    if (flags.strict) config.strict = true;
    return config;
}

int cmd_synth(const SyntheticConfig& sc, std::uint64_t seed, const std::string& out_dir) {
    SyntheticPair pair = generate_synthetic_pair(sc, seed);
    fs::create_directories(out_dir);
    write_corpus(pair.corpus_a, (fs::path(out_dir) / (sc.platform_a + ".corpus.json")).string());
    write_corpus(pair.corpus_b, (fs::path(out_dir) / (sc.platform_b + ".corpus.json")).string());
    write_equivalence_pairs(pair.equivalences, (fs::path(out_dir) / "pairs.csv").string());
    std::cout << "platform " << sc.platform_a << ": " << pair.corpus_a.skills.size()
              << " skills, " << pair.corpus_a.interactions.size() << " interactions\n"
              << "platform " << sc.platform_b << ": " << pair.corpus_b.skills.size()
              << " skills, " << pair.corpus_b.interactions.size() << " interactions\n"
              << "equivalence pairs: " << pair.equivalences.pairs.size() << "\n";
    return 0;
}

int cmd_ingest(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    PreparedData data = ingest(config);
    fs::create_directories(config.output_dir);
    write_corpus(data.source, (fs::path(config.output_dir) / "source.corpus.json").string());
    write_corpus(data.destination,
                 (fs::path(config.output_dir) / "destination.corpus.json").string());
    if (!config.pairs_path.empty()) {
        write_equivalence_pairs(data.pairs,
                                (fs::path(config.output_dir) / "pairs.csv").string());
    }
    std::cout << "source: " << data.source.skills.size() << " skills, "
              << data.source.interactions.size() << " interactions\n"
              << "destination: " << data.destination.skills.size() << " skills, "
              << data.destination.interactions.size() << " interactions\n";
    return 0;
}

PreparedData load_prepared(const ExperimentConfig& config, const std::string& corpora_dir) {
    if (!corpora_dir.empty()) {
        PreparedData data;
        data.source = read_corpus((fs::path(corpora_dir) / "source.corpus.json").string());
        data.destination =
            read_corpus((fs::path(corpora_dir) / "destination.corpus.json").string());
        const fs::path pairs = fs::path(corpora_dir) / "pairs.csv";
        if (fs::exists(pairs)) data.pairs = load_equivalence_pairs(pairs.string());
        return data;
    }
    return ingest(config);
}

int cmd_represent(const CommonFlags& flags, const std::string& corpora_dir) {
    ExperimentConfig config = load_config(flags);
    PreparedData data = load_prepared(config, corpora_dir);
    ModelRunner runner = make_model_runner(config, data);
    const HyperSet h = runner.grid.empty() ? HyperSet{} : runner.grid.front();
    fs::create_directories(config.output_dir);
    if (runner.build_spaces_labeled) {
        auto [src, dst] = runner.build_spaces_labeled(h, data.pairs, config.seed * 7919);
        write_embedding_file(src, (fs::path(config.output_dir) / "source.emb").string());
        write_embedding_file(dst, (fs::path(config.output_dir) / "destination.emb").string());
    } else {
        auto [src, dst] = runner.build_spaces(h);
        write_embedding_file(src, (fs::path(config.output_dir) / "source.emb").string());
        write_embedding_file(dst, (fs::path(config.output_dir) / "destination.emb").string());
    }
    std::cout << "model " << runner.name << ", hyperparameters " << h.id() << "\n"
              << "wrote source.emb and destination.emb to " << config.output_dir << "\n";
    return 0;
}

int cmd_translate(const std::string& src_path, const std::string& dst_path,
                  const std::string& pairs_path, const std::string& out_path,
                  std::uint64_t seed) {
    EmbeddingSpace src = read_embedding_file(src_path, "source");
    EmbeddingSpace dst = read_embedding_file(dst_path, "destination");
    EquivalenceSet pairs = load_equivalence_pairs(pairs_path);
    FitOptions opts;
    opts.seed = seed;
    TranslationMatrix t = fit_translation(src, dst, pairs, opts);
    write_translation_matrix(t, out_path);
    std::cout << "epochs run: " << t.epochs_run
              << ", best validation loss: " << t.best_validation_loss << "\n";
    return 0;
}

RankedPredictions rank_from_files(const std::string& src_path, const std::string& dst_path,
                                  const std::string& matrix_path, int k) {
    EmbeddingSpace src = read_embedding_file(src_path, "source");
    EmbeddingSpace dst = read_embedding_file(dst_path, "destination");
    if (!matrix_path.empty()) {
        src = apply_translation(read_translation_matrix(matrix_path), src);
    }
    if (k <= 0) k = static_cast<int>(dst.size());
    return rank_equivalents(src, dst, k);
}

int cmd_rank(const std::string& src_path, const std::string& dst_path,
             const std::string& matrix_path, int k, const std::string& out_path) {
    RankedPredictions preds = rank_from_files(src_path, dst_path, matrix_path, k);
    write_predictions(preds, out_path);
    std::cout << "ranked " << preds.ranking.size() << " source skills (top " << preds.k << ")\n";
    if (!preds.excluded_zero_vectors.empty()) {
        std::cout << "excluded zero-vector skills: " << preds.excluded_zero_vectors.size() << "\n";
    }
    return 0;
}

int cmd_evaluate(const std::string& src_path, const std::string& dst_path,
                 const std::string& matrix_path, const std::string& pairs_path, int k) {
    EquivalenceSet truth = load_equivalence_pairs(pairs_path);
    // MRR needs the full ranking regardless of k
    RankedPredictions preds = rank_from_files(src_path, dst_path, matrix_path, 0);
    nlohmann::json j;
    j["k"] = k;
    j["recall_at_k"] = recall_at_k(preds, truth, k);
    j["mrr"] = mean_reciprocal_rank(preds, truth);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_analyze(const std::vector<std::string>& space_paths, const std::string& pairs_path,
                int clusters, std::uint64_t seed, const std::string& out_path) {
    // pool every input space into one for clustering; names double as
    // platform labels in the export
    std::vector<std::pair<std::string, EmbeddingSpace>> spaces;
    EmbeddingSpace pooled("pooled", 0);
    for (const auto& path : space_paths) {
        const std::string label = fs::path(path).stem().string();
        EmbeddingSpace s = read_embedding_file(path, label);
        if (pooled.dimension() == 0) pooled = EmbeddingSpace("pooled", s.dimension());
        for (const auto& [id, v] : s.vectors()) pooled.insert(id, v);
        spaces.emplace_back(label, std::move(s));
    }
    ClusterAssignment assignment = kmeans(pooled, clusters, seed);
    std::cout << "clusters: " << clusters << ", inertia: " << assignment.inertia << "\n";
    if (!pairs_path.empty()) {
        EquivalenceSet truth = load_equivalence_pairs(pairs_path);
        auto scores = cluster_match_score(assignment, truth);
        for (const auto& [cluster, score] : scores) {
            std::cout << "cluster " << cluster << ": ";
            if (score) std::cout << *score << "\n";
            else std::cout << "no labeled members\n";
        }
    }
    if (!out_path.empty()) {
        export_projection(spaces, assignment, out_path);
        std::cout << "wrote projection to " << out_path << "\n";
    }
    return 0;
}

int cmd_run(const CommonFlags& flags) {
    ExperimentConfig config = load_config(flags);
    PipelineResult result = run_pipeline(config);
    std::cout << result.report.to_table();
    if (result.none_evaluation) {
        std::cout << "none threshold: " << result.none_evaluation->chosen_threshold
                  << "  recall@k threshold mode: " << result.none_evaluation->threshold_recall
                  << "  ignore baseline: " << result.none_evaluation->ignore_recall << "\n";
    }
    std::cout << "artifacts: " << result.artifact_files.size() << " files under "
              << config.output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cross-platform skill alignment pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a paired synthetic dataset");
    SyntheticConfig sc;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "out";
    synth->add_option("--latent-skills", sc.latent_skills, "shared latent skill count");
    synth->add_option("--granularity-a", sc.granularity_a, "platform A skills per latent");
    synth->add_option("--granularity-b", sc.granularity_b, "platform B skills per latent");
    synth->add_option("--vocab", sc.vocabulary_size, "token vocabulary size");
    synth->add_option("--students", sc.students_per_platform, "students per platform");
    synth->add_option("--interactions", sc.interactions_per_student, "interactions per student");
    synth->add_option("--problems-per-skill", sc.problems_per_skill, "problems per skill");
    synth->add_option("--tokens-per-problem", sc.tokens_per_problem, "tokens per problem text");
    synth->add_option("--none-fraction", sc.none_fraction, "fraction of unmatched skills per side");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output directory");

    // ingest
    auto* ing = app.add_subcommand("ingest", "load, clean and snapshot both platforms");
    CommonFlags ing_flags;
    add_common(ing, ing_flags, true);

    // represent
    auto* rep = app.add_subcommand("represent", "build skill spaces for the configured models");
    CommonFlags rep_flags;
    std::string rep_corpora;
    add_common(rep, rep_flags, true);
    rep->add_option("--corpora", rep_corpora, "directory with corpus snapshots from 'ingest'");

    // translate
    auto* tr = app.add_subcommand("translate", "fit a linear map between two spaces");
    std::string tr_src, tr_dst, tr_pairs, tr_out = "translation.txt";
    std::uint64_t tr_seed = 1;
    tr->add_option("--src-space", tr_src, "source embedding file")->required();
    tr->add_option("--dst-space", tr_dst, "destination embedding file")->required();
    tr->add_option("--pairs", tr_pairs, "training pairs file")->required();
    tr->add_option("--out", tr_out, "output matrix file");
    tr->add_option("--seed", tr_seed, "validation split seed");

    // rank
    auto* rk = app.add_subcommand("rank", "rank destination skills per source skill");
    std::string rk_src, rk_dst, rk_matrix, rk_out = "predictions.csv";
    int rk_k = 0;
    rk->add_option("--src-space", rk_src, "source embedding file")->required();
    rk->add_option("--dst-space", rk_dst, "destination embedding file")->required();
    rk->add_option("--matrix", rk_matrix, "translation matrix applied to the source");
    rk->add_option("-k,--top-k", rk_k, "predictions per source skill (0 = all)");
    rk->add_option("--out", rk_out, "predictions CSV path");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "recall@k and MRR against a truth file");
    std::string ev_src, ev_dst, ev_matrix, ev_pairs;
    int ev_k = 5;
    ev->add_option("--src-space", ev_src, "source embedding file")->required();
    ev->add_option("--dst-space", ev_dst, "destination embedding file")->required();
    ev->add_option("--matrix", ev_matrix, "translation matrix applied to the source");
    ev->add_option("--pairs", ev_pairs, "truth pairs file")->required();
    ev->add_option("-k,--top-k", ev_k, "recall cutoff");

    // analyze
    auto* an = app.add_subcommand("analyze", "cluster skills and score cross-platform mixing");
    std::vector<std::string> an_spaces;
    std::string an_pairs, an_out;
    int an_clusters = 20;
    std::uint64_t an_seed = 1;
    an->add_option("--space", an_spaces, "embedding file (repeatable)")->required();
    an->add_option("--pairs", an_pairs, "truth pairs for cluster match scores");
    an->add_option("--clusters", an_clusters, "cluster count");
    an->add_option("--seed", an_seed, "clustering seed");
    an->add_option("--out", an_out, "projection CSV path");

    // run
    auto* run = app.add_subcommand("run", "full experiment from a config");
    CommonFlags run_flags;
    add_common(run, run_flags, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(sc, synth_seed, synth_out);
        if (ing->parsed()) return cmd_ingest(ing_flags);
        if (rep->parsed()) return cmd_represent(rep_flags, rep_corpora);
        if (tr->parsed()) return cmd_translate(tr_src, tr_dst, tr_pairs, tr_out, tr_seed);
        if (rk->parsed()) return cmd_rank(rk_src, rk_dst, rk_matrix, rk_k, rk_out);
        if (ev->parsed()) return cmd_evaluate(ev_src, ev_dst, ev_matrix, ev_pairs, ev_k);
        if (an->parsed()) return cmd_analyze(an_spaces, an_pairs, an_clusters, an_seed, an_out);
        if (run->parsed()) return cmd_run(run_flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
