#include "doctest.h"

#include <memory>
#include <random>

#include "skillmap/embedding.hpp"
#include "skillmap/errors.hpp"
#include "skillmap/evaluate.hpp"

using namespace skillmap;

namespace {

RankedPredictions make_ranking(
    std::map<std::string, std::vector<std::pair<std::string, double>>> ranking, int k) {
    RankedPredictions p;
    p.ranking = std::move(ranking);
    p.k = k;
    return p;
}

}  // namespace

TEST_CASE("recall and MRR fixtures") {
    EquivalenceSet truth;
    truth.pairs = {{"a", "x"}, {"b", "y"}};
    auto p = make_ranking({{"a", {{"x", 0.9}, {"z", 0.8}}}, {"b", {{"z", 0.9}, {"y", 0.8}}}}, 2);
    CHECK(recall_at_k(p, truth, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(recall_at_k(p, truth, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_reciprocal_rank(p, truth) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(recall_at_k(p, EquivalenceSet{}, 1), DataError);
    CHECK_THROWS_AS(mean_reciprocal_rank(p, EquivalenceSet{}), DataError);
}

TEST_CASE("recall is monotone in k") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, 9);
    for (int trial = 0; trial < 20; ++trial) {
        RankedPredictions p;
        p.k = 10;
        EquivalenceSet truth;
        for (int s = 0; s < 4; ++s) {
            const std::string src = "s" + std::to_string(s);
            std::vector<std::pair<std::string, double>> ranked;
            for (int d = 0; d < 10; ++d) {
                ranked.emplace_back("d" + std::to_string(d), 1.0 - 0.05 * d);
            }
            std::shuffle(ranked.begin(), ranked.end(), rng);
            p.ranking[src] = ranked;
            truth.pairs.insert({src, "d" + std::to_string(pick(rng))});
        }
        double prev = 0.0;
        for (int k = 1; k <= 10; ++k) {
            const double r = recall_at_k(p, truth, k);
            CHECK(r >= prev);
            prev = r;
        }
        CHECK(prev == 1.0);  // full depth always finds the pair
    }
}

TEST_CASE("none thresholding") {
    auto p = make_ranking({{"a", {{"x", 0.9}, {"y", 0.3}}}, {"n", {{"x", 0.2}, {"y", 0.1}}}}, 2);
    CHECK_THROWS_AS(apply_none_threshold(p, 1.5), ConfigError);

    RankedPredictions cut = apply_none_threshold(p, 0.4);
    CHECK(cut.ranking.at("a")[0].first == "x");
    CHECK(cut.ranking.at("a")[1].first == kNonePrediction);
    CHECK(cut.ranking.at("n")[0].first == kNonePrediction);

    EquivalenceSet truth;
    truth.pairs = {{"a", "x"}};
    truth.none_skills_src = {"n"};
    // a hit plus a none-source whose top prediction is NONE
    CHECK(recall_at_k_with_none(cut, truth, 2) == doctest::Approx(1.0).epsilon(1e-12));
    // ignore baseline can never score the none source
    CHECK(recall_at_k_ignore_baseline(p, truth, 2) == doctest::Approx(0.5).epsilon(1e-12));
    // an aggressive threshold kills the real pair too
    RankedPredictions all_none = apply_none_threshold(p, 0.95);
    CHECK(recall_at_k_with_none(all_none, truth, 2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("threshold selection prefers the smaller tie") {
    auto p = make_ranking({{"a", {{"x", 0.9}}}, {"n", {{"x", 0.2}}}}, 1);
    EquivalenceSet truth;
    truth.pairs = {{"a", "x"}};
    truth.none_skills_src = {"n"};
    // every threshold in (0.2, 0.9] scores 1.0; ties resolve downward
    CHECK(select_none_threshold(p, truth, 1) == doctest::Approx(0.3));
    CHECK(select_none_threshold(p, truth, 1, {0.5, 0.4, 0.6}) == doctest::Approx(0.4));
}

TEST_CASE("fleiss kappa") {
    SUBCASE("perfect agreement across distinct categories") {
        AnnotationTable t{{{2, 0}, {0, 2}}};
        FleissKappa k = fleiss_kappa(t);
        CHECK_FALSE(k.degenerate);
        CHECK(k.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("systematic disagreement") {
        AnnotationTable t{{{1, 1}, {1, 1}}};
        CHECK(fleiss_kappa(t).value == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("single category is degenerate") {
        AnnotationTable t{{{2, 0}, {2, 0}}};
        CHECK(fleiss_kappa(t).degenerate);
    }
    SUBCASE("published worked example") {
        AnnotationTable t{{{0, 0, 0, 0, 14},
                           {0, 2, 6, 4, 2},
                           {0, 0, 3, 5, 6},
                           {0, 3, 9, 2, 0},
                           {2, 2, 8, 1, 1},
                           {7, 7, 0, 0, 0},
                           {3, 2, 6, 3, 0},
                           {2, 5, 3, 2, 2},
                           {6, 5, 2, 1, 0},
                           {0, 2, 2, 3, 7}}};
        CHECK(fleiss_kappa(t).value == doctest::Approx(0.210).epsilon(1e-3));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(fleiss_kappa(AnnotationTable{}), DataError);
        CHECK_THROWS_AS(fleiss_kappa(AnnotationTable{{{2, 0}, {1, 2}}}), DataError);
        CHECK_THROWS_AS(fleiss_kappa(AnnotationTable{{{1, 0}}}), DataError);
    }
}

TEST_CASE("hyperparameter set identifiers") {
    CHECK(HyperSet{}.id() == "default");
    HyperSet h{{{"window", 5.0}, {"dim", 50.0}}};
    CHECK(h.id() == "dim=50,window=5");
}

TEST_CASE("pair partitions are balanced, disjoint and exhaustive") {
    for (int n : {7, 23, 85}) {
        EquivalenceSet pairs;
        for (int i = 0; i < n; ++i) {
            pairs.pairs.insert({"s" + std::to_string(i), "d" + std::to_string(i % 5)});
        }
        auto folds = partition_pairs(pairs, 5, 99);
        std::set<std::pair<std::string, std::string>> seen;
        std::size_t lo = n, hi = 0;
        for (const auto& f : folds) {
            lo = std::min(lo, f.size());
            hi = std::max(hi, f.size());
            for (const auto& p : f) CHECK(seen.insert(p).second);
        }
        CHECK(seen == pairs.pairs);
        CHECK(hi - lo <= 1);
        // deterministic per seed
        CHECK(partition_pairs(pairs, 5, 99) == folds);
    }
}

TEST_CASE("skill-disjoint partitions keep a source in one fold") {
    EquivalenceSet pairs;
    for (int i = 0; i < 12; ++i) {
        const std::string src = "s" + std::to_string(i % 4);  // 4 sources, 3 pairs each
        pairs.pairs.insert({src, "d" + std::to_string(i)});
    }
    auto folds = partition_pairs(pairs, 3, 1, true);
    std::map<std::string, int> fold_of;
    for (int f = 0; f < 3; ++f) {
        for (const auto& [src, dst] : folds[f]) {
            auto it = fold_of.find(src);
            if (it == fold_of.end()) fold_of[src] = f;
            else CHECK(it->second == f);
        }
    }
}

namespace {

struct ToyTranslationFixture {
    std::shared_ptr<EmbeddingSpace> src, clean, noisy;
    EquivalenceSet pairs;
    ModelRunner model;

    explicit ToyTranslationFixture(int n = 40, int dim = 6) {
        src = std::make_shared<EmbeddingSpace>("src", dim);
        clean = std::make_shared<EmbeddingSpace>("dst", dim);
        noisy = std::make_shared<EmbeddingSpace>("dst", dim);
        std::mt19937_64 rng(17);
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::MatrixXd R(dim, dim);
        for (int i = 0; i < R.size(); ++i) R.data()[i] = g(rng);
        Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ();
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd v(dim), e(dim);
            for (int j = 0; j < dim; ++j) {
                v[j] = g(rng);
                e[j] = g(rng);
            }
            const std::string s = "s" + std::to_string(i), d = "d" + std::to_string(i);
            src->insert(s, v);
            clean->insert(d, Q * v);
            noisy->insert(d, Q * v + 2.0 * e);
            pairs.pairs.insert({s, d});
        }
        model.name = "toy";
        model.needs_translation = true;
        model.needs_tuning = true;
        model.grid = {HyperSet{{{"noise", 0.0}}}, HyperSet{{{"noise", 1.0}}}};
        auto cs = src;
        auto cc = clean;
        auto cn = noisy;
        model.build_spaces = [cs, cc, cn](const HyperSet& h) {
            return std::make_pair(*cs, h.values.at("noise") > 0.5 ? *cn : *cc);
        };
    }
};

}  // namespace

TEST_CASE("cross validation tunes, evaluates and stays deterministic") {
    ToyTranslationFixture fx;
    CrossValidateOptions cv;
    cv.folds = 4;
    cv.inner_folds = 2;
    cv.k = 3;
    cv.seed = 21;
    cv.fit.max_epochs = 120;

    EvaluationReport rep = cross_validate(fx.model, fx.pairs, cv);
    REQUIRE(rep.folds.size() == 4);
    for (const auto& f : rep.folds) {
        CHECK(f.hyper_id == "noise=0");  // inner CV rejects the noisy spaces
    }
    CHECK(rep.mean_mrr > 0.5);

    EvaluationReport again = cross_validate(fx.model, fx.pairs, cv);
    CHECK(rep.to_json() == again.to_json());

    cv.workers = 3;  // parallel cache warm-up must not change results
    EvaluationReport parallel = cross_validate(fx.model, fx.pairs, cv);
    CHECK(rep.to_json() == parallel.to_json());
}

TEST_CASE("tuning without a grid is a config error") {
    ToyTranslationFixture fx;
    fx.model.grid.clear();
    CrossValidateOptions cv;
    cv.folds = 3;
    CHECK_THROWS_AS(cross_validate(fx.model, fx.pairs, cv), ConfigError);
}

TEST_CASE("label-free untuned models evaluate once against all pairs") {
    ToyTranslationFixture fx;
    ModelRunner direct;
    direct.name = "direct";
    auto cs = fx.src;
    EmbeddingSpace dst_same("dst", 6);
    for (const auto& [id, v] : fx.src->vectors()) {
        dst_same.insert("d" + id.substr(1), v);
    }
    direct.build_spaces = [cs, dst_same](const HyperSet&) {
        return std::make_pair(*cs, dst_same);
    };
    CrossValidateOptions cv;
    cv.folds = 5;
    cv.k = 1;
    EvaluationReport rep = cross_validate(direct, fx.pairs, cv);
    REQUIRE(rep.folds.size() == 1);  // no labels used anywhere, nothing to hold out
    CHECK(rep.mean_recall == doctest::Approx(1.0));
    CHECK(rep.mean_mrr == doctest::Approx(1.0));
}

TEST_CASE("per-fold callback sees matrices and predictions") {
    ToyTranslationFixture fx;
    CrossValidateOptions cv;
    cv.folds = 3;
    cv.inner_folds = 2;
    cv.fit.max_epochs = 60;
    int calls = 0;
    bool matrices = true;
    cv.on_fold = [&](int fold, const TranslationMatrix* m, const RankedPredictions& r) {
        ++calls;
        if (m == nullptr) matrices = false;
        CHECK(!r.ranking.empty());
        CHECK(fold == calls - 1);
    };
    cross_validate(fx.model, fx.pairs, cv);
    CHECK(calls == 3);
    CHECK(matrices);
}
