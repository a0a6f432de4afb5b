#include <benchmark/benchmark.h>

#include <random>

#include "skillmap/analysis.hpp"
#include "skillmap/corpus.hpp"
#include "skillmap/skipgram.hpp"
#include "skillmap/synthetic.hpp"
#include "skillmap/tamf.hpp"

using namespace skillmap;

namespace {

SyntheticPair benchmark_pair() {
    SyntheticConfig sc;
    sc.latent_skills = 30;
    sc.granularity_a = 2.0;
    sc.students_per_platform = 100;
    sc.interactions_per_student = 60;
    static SyntheticPair pair = generate_synthetic_pair(sc, 1);
    return pair;
}

PlatformCorpus prepared_corpus() {
    PreprocessOptions opts;
    opts.min_responses_per_skill = 1;
    PlatformCorpus c = preprocess(benchmark_pair().corpus_a, opts);
    c.sequences = build_skill_sequences(c, 1);
    return c;
}

}  // namespace

static void BM_SkipgramTraining(benchmark::State& state) {
    PlatformCorpus c = prepared_corpus();
    SkipgramHyper hyper;
    hyper.vector_dimension = static_cast<int>(state.range(0));
    hyper.epochs = 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_skipgram(c.sequences, hyper));
    }
}
BENCHMARK(BM_SkipgramTraining)->Arg(25)->Arg(50);

static void BM_PpmiConstruction(benchmark::State& state) {
    PlatformCorpus c = prepared_corpus();
    std::vector<std::string> skills(c.skills.begin(), c.skills.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_ppmi(c.sequences, skills, static_cast<int>(state.range(0))));
    }
}
BENCHMARK(BM_PpmiConstruction)->Arg(5)->Arg(20);

static void BM_TamfIterations(benchmark::State& state) {
    PlatformCorpus c = prepared_corpus();
    std::vector<std::string> skills(c.skills.begin(), c.skills.end());
    PpmiMatrix m = build_ppmi(c.sequences, skills, 5);
    EmbeddingSpace content("content", 20);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    for (const auto& s : skills) {
        Eigen::VectorXd v(20);
        for (int i = 0; i < 20; ++i) v[i] = g(rng);
        content.insert(s, v);
    }
    TamfOptions opts;
    opts.k = static_cast<int>(state.range(0));
    opts.max_iterations = 10;
    opts.tolerance = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tamf_factorize(m, content, opts));
    }
}
BENCHMARK(BM_TamfIterations)->Arg(10)->Arg(25);

static void BM_KMeans(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    EmbeddingSpace space("points", 50);
    for (int i = 0; i < 300; ++i) {
        Eigen::VectorXd v(50);
        for (int j = 0; j < 50; ++j) v[j] = g(rng);
        space.insert("p" + std::to_string(i), v);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans(space, static_cast<int>(state.range(0)), 1));
    }
}
BENCHMARK(BM_KMeans)->Arg(10)->Arg(30);

BENCHMARK_MAIN();
