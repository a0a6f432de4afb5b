#include "skillmap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "json.hpp"
#include "skillmap/errors.hpp"

namespace skillmap {

double recall_at_k(const RankedPredictions& predictions, const EquivalenceSet& truth, int k) {
    if (truth.pairs.empty()) throw DataError("recall@k needs a nonempty truth set");
    std::size_t hits = 0;
    for (const auto& [src, dst] : truth.pairs) {
        auto it = predictions.ranking.find(src);
        if (it == predictions.ranking.end()) continue;  // counts as false negative
        const auto& ranked = it->second;
        const int limit = std::min<int>(k, static_cast<int>(ranked.size()));
        for (int i = 0; i < limit; ++i) {
            if (ranked[i].first == dst) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(truth.pairs.size());
}

double mean_reciprocal_rank(const RankedPredictions& predictions, const EquivalenceSet& truth) {
    if (truth.pairs.empty()) throw DataError("MRR needs a nonempty truth set");
    const auto sources = truth.source_skills();
    double total = 0.0;
    for (const auto& src : sources) {
        const auto relevant = truth.destinations_of(src);
        auto it = predictions.ranking.find(src);
        if (it == predictions.ranking.end()) continue;  // contributes 0
        const auto& ranked = it->second;
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (relevant.count(ranked[i].first)) {
                total += 1.0 / static_cast<double>(i + 1);
                break;
            }
        }
    }
    return total / static_cast<double>(sources.size());
}

RankedPredictions apply_none_threshold(const RankedPredictions& predictions, double threshold) {
    if (threshold < -1.0 || threshold > 1.0) {
        throw ConfigError("none threshold must lie in [-1, 1]");
    }
    RankedPredictions out = predictions;
    for (auto& [src, ranked] : out.ranking) {
        for (auto& entry : ranked) {
            if (entry.second < threshold) entry.first = kNonePrediction;
        }
    }
    return out;
}

double recall_at_k_with_none(const RankedPredictions& predictions, const EquivalenceSet& truth,
                             int k) {
    const std::size_t denom = truth.pairs.size() + truth.none_skills_src.size();
    if (denom == 0) throw DataError("recall@k needs a nonempty truth set");
    std::size_t hits = 0;
    for (const auto& [src, dst] : truth.pairs) {
        auto it = predictions.ranking.find(src);
        if (it == predictions.ranking.end()) continue;
        const auto& ranked = it->second;
        const int limit = std::min<int>(k, static_cast<int>(ranked.size()));
        for (int i = 0; i < limit; ++i) {
            if (ranked[i].first == dst) {
                ++hits;
                break;
            }
        }
    }
    for (const auto& src : truth.none_skills_src) {
        auto it = predictions.ranking.find(src);
        if (it == predictions.ranking.end() || it->second.empty()) continue;
        if (it->second.front().first == kNonePrediction) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(denom);
}

double recall_at_k_ignore_baseline(const RankedPredictions& predictions,
                                   const EquivalenceSet& truth, int k) {
    const std::size_t denom = truth.pairs.size() + truth.none_skills_src.size();
    if (denom == 0) throw DataError("recall@k needs a nonempty truth set");
    std::size_t hits = 0;
    for (const auto& [src, dst] : truth.pairs) {
        auto it = predictions.ranking.find(src);
        if (it == predictions.ranking.end()) continue;
        const auto& ranked = it->second;
        const int limit = std::min<int>(k, static_cast<int>(ranked.size()));
        for (int i = 0; i < limit; ++i) {
            if (ranked[i].first == dst) {
                ++hits;
                break;
            }
        }
    }
    // none-marked sources are always counted wrong
    return static_cast<double>(hits) / static_cast<double>(denom);
}

double select_none_threshold(const RankedPredictions& predictions, const EquivalenceSet& truth,
                             int k, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("none-threshold grid is empty");
    double best_threshold = grid.front();
    double best_recall = -1.0;
    for (double t : grid) {
        const double r = recall_at_k_with_none(apply_none_threshold(predictions, t), truth, k);
        if (r > best_recall || (r == best_recall && t < best_threshold)) {
            best_recall = r;
            best_threshold = t;
        }
    }
    return best_threshold;
}

FleissKappa fleiss_kappa(const AnnotationTable& table) {
    if (table.ratings.empty()) throw DataError("Fleiss' kappa needs at least one item");
    const std::size_t categories = table.ratings.front().size();
    long long raters = 0;
    for (const auto& row : table.ratings) {
        if (row.size() != categories) throw DataError("annotation rows disagree on category count");
        long long total = 0;
        for (int c : row) total += c;
        if (raters == 0) raters = total;
        if (total != raters) throw DataError("annotation rows disagree on rater count");
    }
    if (raters < 2) throw DataError("Fleiss' kappa needs at least 2 raters");

    const double N = static_cast<double>(table.ratings.size());
    const double n = static_cast<double>(raters);

    double p_bar = 0.0;
    std::vector<double> p_cat(categories, 0.0);
    for (const auto& row : table.ratings) {
        double agree = 0.0;
        for (std::size_t j = 0; j < categories; ++j) {
            agree += static_cast<double>(row[j]) * (row[j] - 1);
            p_cat[j] += row[j];
        }
        p_bar += agree / (n * (n - 1.0));
    }
    p_bar /= N;
    double pe = 0.0;
    for (double pj : p_cat) {
        pj /= (N * n);
        pe += pj * pj;
    }

    FleissKappa out;
    if (std::abs(1.0 - pe) < 1e-15) {
        out.degenerate = true;
        out.value = p_bar >= 1.0 - 1e-15 ? 1.0 : 0.0;
        return out;
    }
    out.value = (p_bar - pe) / (1.0 - pe);
    return out;
}

// ---- cross-validation harness ----

std::string HyperSet::id() const {
    if (values.empty()) return "default";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, value] : values) {
        if (!first) os << ',';
        first = false;
        os << key << '=' << value;
    }
    return os.str();
}

std::vector<std::vector<std::pair<std::string, std::string>>> partition_pairs(
    const EquivalenceSet& pairs, int folds, std::uint64_t seed, bool skill_disjoint) {
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (pairs.pairs.size() < static_cast<std::size_t>(folds)) {
        throw DataError("need at least as many pairs as folds");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::pair<std::string, std::string>>> out(folds);

    if (skill_disjoint) {
        std::map<std::string, std::vector<std::pair<std::string, std::string>>> groups;
        for (const auto& p : pairs.pairs) groups[p.first].push_back(p);
        std::vector<std::string> keys;
        for (const auto& [k, v] : groups) keys.push_back(k);
        std::shuffle(keys.begin(), keys.end(), rng);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            auto& bucket = out[i % folds];
            const auto& group = groups[keys[i]];
            bucket.insert(bucket.end(), group.begin(), group.end());
        }
    } else {
        std::vector<std::pair<std::string, std::string>> all(pairs.pairs.begin(), pairs.pairs.end());
        std::shuffle(all.begin(), all.end(), rng);
        for (std::size_t i = 0; i < all.size(); ++i) out[i % folds].push_back(all[i]);
    }
    return out;
}

namespace {

EquivalenceSet to_set(const std::vector<std::pair<std::string, std::string>>& pairs) {
    EquivalenceSet out;
    out.pairs.insert(pairs.begin(), pairs.end());
    return out;
}

// rank over every destination skill so MRR ranks always exist
RankedPredictions full_ranking(const EmbeddingSpace& src, const EmbeddingSpace& dst) {
    return rank_equivalents(src, dst, static_cast<int>(dst.size()));
}

}  // namespace

EvaluationReport cross_validate(const ModelRunner& model, const EquivalenceSet& pairs,
                                const CrossValidateOptions& options) {
    if (model.needs_tuning && model.grid.empty()) {
        throw ConfigError("model '" + model.name + "' requires tuning but the grid is empty");
    }

    EvaluationReport report;
    report.model = model.name;
    report.k = options.k;
    {
        std::ostringstream fp;
        fp << "model=" << model.name << ";folds=" << options.folds << ";k=" << options.k
           << ";seed=" << options.seed << ";grid=";
        for (const auto& h : model.grid) fp << '[' << h.id() << ']';
        report.fingerprint = fp.str();
    }

    // cache spaces per grid point; representation training never sees labels
    std::map<std::string, std::pair<EmbeddingSpace, EmbeddingSpace>> cache;
    auto spaces_for = [&](const HyperSet& h) -> const std::pair<EmbeddingSpace, EmbeddingSpace>& {
        auto it = cache.find(h.id());
        if (it == cache.end()) {
            it = cache.emplace(h.id(), model.build_spaces(h)).first;
        }
        return it->second;
    };

    const bool labeled_build = static_cast<bool>(model.build_spaces_labeled);

    if (!labeled_build && options.workers > 1 && !model.grid.empty()) {
        // warm the cache concurrently; results land in deterministic order
        std::vector<const HyperSet*> todo;
        for (const auto& h : model.grid) {
            if (!cache.count(h.id())) todo.push_back(&h);
        }
        std::vector<std::pair<std::string, std::future<std::pair<EmbeddingSpace, EmbeddingSpace>>>>
            inflight;
        std::size_t next = 0;
        while (next < todo.size() || !inflight.empty()) {
            while (next < todo.size() &&
                   inflight.size() < static_cast<std::size_t>(options.workers)) {
                const HyperSet* h = todo[next++];
                inflight.emplace_back(h->id(), std::async(std::launch::async,
                                                          [&model, h] { return model.build_spaces(*h); }));
            }
            cache.emplace(inflight.front().first, inflight.front().second.get());
            inflight.erase(inflight.begin());
        }
    }

    // one split evaluation: assemble/align spaces with only the training
    // pairs, rank the full destination set
    auto rank_split = [&](const HyperSet& h, const EquivalenceSet& train, std::uint64_t fit_seed,
                          TranslationMatrix* matrix_out) -> RankedPredictions {
        if (labeled_build) {
            auto [src, dst] = model.build_spaces_labeled(h, train, fit_seed);
            return full_ranking(src, dst);
        }
        const auto& [src, dst] = spaces_for(h);
        if (model.needs_translation) {
            FitOptions fit = options.fit;
            fit.seed = fit_seed;
            TranslationMatrix t = fit_translation(src, dst, train, fit);
            auto ranking = full_ranking(apply_translation(t, src), dst);
            if (matrix_out) *matrix_out = std::move(t);
            return ranking;
        }
        return full_ranking(src, dst);
    };

    if (!model.needs_translation && !model.needs_tuning && !labeled_build) {
        // label-free models are evaluated directly against all ground truth pairs
        const auto& [src, dst] = spaces_for(HyperSet{});
        const auto ranking = full_ranking(src, dst);
        FoldRecord rec;
        rec.fold = 0;
        rec.hyper_id = "default";
        rec.recall = recall_at_k(ranking, pairs, options.k);
        rec.mrr = mean_reciprocal_rank(ranking, pairs);
        report.folds.push_back(rec);
        report.mean_recall = rec.recall;
        report.mean_mrr = rec.mrr;
        return report;
    }

    const auto outer = partition_pairs(pairs, options.folds, options.seed,
                                       options.skill_disjoint_folds);

    for (int f = 0; f < options.folds; ++f) {
        EquivalenceSet outer_test = to_set(outer[f]);
        std::vector<std::pair<std::string, std::string>> train_vec;
        for (int g = 0; g < options.folds; ++g) {
            if (g != f) train_vec.insert(train_vec.end(), outer[g].begin(), outer[g].end());
        }
        EquivalenceSet outer_train = to_set(train_vec);

        HyperSet chosen = model.grid.empty() ? HyperSet{} : model.grid.front();
        if (model.needs_tuning && model.grid.size() > 1) {
            const auto inner = partition_pairs(outer_train, options.inner_folds,
                                               options.seed * 1000 + f);
            double best_mrr = -1.0;
            for (const auto& hyper : model.grid) {
                double sum = 0.0;
                for (int i = 0; i < options.inner_folds; ++i) {
                    EquivalenceSet inner_val = to_set(inner[i]);
                    std::vector<std::pair<std::string, std::string>> it_vec;
                    for (int g = 0; g < options.inner_folds; ++g) {
                        if (g != i) it_vec.insert(it_vec.end(), inner[g].begin(), inner[g].end());
                    }
                    const auto ranking = rank_split(hyper, to_set(it_vec),
                                                    options.seed * 7919 + f * 101 + i, nullptr);
                    sum += mean_reciprocal_rank(ranking, inner_val);
                }
                const double mean_mrr = sum / options.inner_folds;
                if (mean_mrr > best_mrr) {  // strict: ties keep earlier grid order
                    best_mrr = mean_mrr;
                    chosen = hyper;
                }
            }
        }

        TranslationMatrix fold_matrix;
        const bool has_matrix = model.needs_translation && !labeled_build;
        RankedPredictions ranking =
            rank_split(chosen, outer_train, options.seed * 7919 + f, &fold_matrix);
        if (options.on_fold) {
            options.on_fold(f, has_matrix ? &fold_matrix : nullptr, ranking);
        }

        FoldRecord rec;
        rec.fold = f;
        rec.hyper_id = chosen.id();
        rec.recall = recall_at_k(ranking, outer_test, options.k);
        rec.mrr = mean_reciprocal_rank(ranking, outer_test);
        report.folds.push_back(rec);
    }

    for (const auto& rec : report.folds) {
        report.mean_recall += rec.recall;
        report.mean_mrr += rec.mrr;
    }
    report.mean_recall /= report.folds.size();
    report.mean_mrr /= report.folds.size();
    return report;
}

std::string EvaluationReport::to_json() const {
    nlohmann::json j;
    j["model"] = model;
    j["k"] = k;
    j["fingerprint"] = fingerprint;
    j["folds"] = nlohmann::json::array();
    for (const auto& rec : folds) {
        j["folds"].push_back({{"fold", rec.fold},
                              {"hyperparameters", rec.hyper_id},
                              {"recall_at_k", rec.recall},
                              {"mrr", rec.mrr}});
    }
    j["mean_recall_at_k"] = mean_recall;
    j["mean_mrr"] = mean_mrr;
    return j.dump(2);
}

std::string EvaluationReport::to_table() const {
    std::ostringstream os;
    os << "model: " << model << "  (k=" << k << ")\n";
    os << "fold  recall@k  mrr      hyperparameters\n";
    char buf[128];
    for (const auto& rec : folds) {
        std::snprintf(buf, sizeof(buf), "%-5d %-9.4f %-8.4f %s\n", rec.fold, rec.recall, rec.mrr,
                      rec.hyper_id.c_str());
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "mean  %-9.4f %-8.4f\n", mean_recall, mean_mrr);
    os << buf;
    return os.str();
}

}  // namespace skillmap
