#include "skillmap/translate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "skillmap/errors.hpp"

namespace skillmap {

namespace {

struct PairVectors {
    std::vector<Eigen::VectorXd> src;
    std::vector<Eigen::VectorXd> dst;
};

PairVectors collect_pair_vectors(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                                 const EquivalenceSet& pairs) {
    PairVectors pv;
    for (const auto& [s, d] : pairs.pairs) {
        const Eigen::VectorXd& vs = src.at(s);
        const Eigen::VectorXd& vd = dst.at(d);
        if (vs.norm() == 0.0) throw DataError("source skill '" + s + "' has a zero vector");
        if (vd.norm() == 0.0) throw DataError("destination skill '" + d + "' has a zero vector");
        pv.src.push_back(vs);
        pv.dst.push_back(vd);
    }
    return pv;
}

// mean cosine distance of T*src to dst over the given indices
double mean_cosine_distance(const Eigen::MatrixXd& T, const PairVectors& pv,
                            const std::vector<std::size_t>& idx) {
    double total = 0.0;
    for (std::size_t i : idx) {
        const Eigen::VectorXd x = T * pv.src[i];
        const double nx = x.norm();
        if (nx == 0.0) {
            total += 1.0;  // worst case, translated vector vanished
            continue;
        }
        total += 1.0 - x.dot(pv.dst[i]) / (nx * pv.dst[i].norm());
    }
    return total / static_cast<double>(idx.size());
}

}  // namespace

TranslationMatrix fit_translation(const EmbeddingSpace& src, const EmbeddingSpace& dst,
                                  const EquivalenceSet& train_pairs, const FitOptions& opts) {
    if (train_pairs.pairs.size() < 5) {
        throw DataError("fit_translation needs at least 5 training pairs, got " +
                        std::to_string(train_pairs.pairs.size()));
    }
    PairVectors pv = collect_pair_vectors(src, dst, train_pairs);
    const int n = src.dimension();
    const int m = dst.dimension();
    const std::size_t total = pv.src.size();

    // seeded 80/20 split
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    std::mt19937_64 rng(opts.seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_val = static_cast<std::size_t>(std::lround(opts.validation_fraction * total));
    if (n_val == 0) n_val = 1;
    if (n_val >= total) n_val = total - 1;
    std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());

    std::uniform_real_distribution<double> init(-0.01, 0.01);
    Eigen::MatrixXd T(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) T(i, j) = init(rng);

    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(m, n);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(m, n);

    Eigen::MatrixXd best_T = T;
    double best_val = mean_cosine_distance(T, pv, val_idx);
    int epochs_since_best = 0;
    int epochs_run = 0;

    for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
        // full-batch gradient of mean(1 - cos(T s, d))
        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(m, n);
        for (std::size_t i : train_idx) {
            const Eigen::VectorXd& s = pv.src[i];
            const Eigen::VectorXd& d = pv.dst[i];
            const Eigen::VectorXd x = T * s;
            const double nx = x.norm();
            if (nx == 0.0) continue;
            const double nd = d.norm();
            const double cos = x.dot(d) / (nx * nd);
            // d(1-cos)/dx = -(d/(|x||d|) - cos * x/|x|^2)
            const Eigen::VectorXd dx = -(d / (nx * nd) - cos * x / (nx * nx));
            grad += dx * s.transpose();
        }
        grad /= static_cast<double>(train_idx.size());

        m1 = opts.beta1 * m1 + (1.0 - opts.beta1) * grad;
        m2 = opts.beta2 * m2 + (1.0 - opts.beta2) * grad.cwiseProduct(grad);
        const double bc1 = 1.0 - std::pow(opts.beta1, epoch);
        const double bc2 = 1.0 - std::pow(opts.beta2, epoch);
        T -= (opts.learning_rate / bc1) *
             (m1.array() / ((m2.array() / bc2).sqrt() + opts.epsilon)).matrix();

        epochs_run = epoch;
        const double val = mean_cosine_distance(T, pv, val_idx);
        if (val < best_val) {
            best_val = val;
            best_T = T;
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (epochs_since_best >= opts.patience) break;
        }
    }

    if (!best_T.allFinite()) throw NumericError("translation matrix diverged to non-finite values");

    TranslationMatrix out;
    out.matrix = std::move(best_T);
    out.source_space_name = src.name();
    out.destination_space_name = dst.name();
    out.epochs_run = epochs_run;
    out.best_validation_loss = best_val;
    return out;
}

EmbeddingSpace apply_translation(const TranslationMatrix& t, const EmbeddingSpace& space) {
    if (space.dimension() != t.matrix.cols()) {
        throw DataError("translation expects dimension " + std::to_string(t.matrix.cols()) +
                        ", space '" + space.name() + "' has " + std::to_string(space.dimension()));
    }
    EmbeddingSpace out(space.name() + ".translated", static_cast<int>(t.matrix.rows()),
                       Provenance{"translated", true,
                                  t.source_space_name + " -> " + t.destination_space_name});
    for (const auto& [id, v] : space.vectors()) {
        out.insert(id, t.matrix * v);
    }
    return out;
}

void write_translation_matrix(const TranslationMatrix& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << t.matrix.rows() << ' ' << t.matrix.cols() << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < t.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.matrix.cols(); ++j) {
            if (j) out << ' ';
            out << t.matrix(i, j);
        }
        out << '\n';
    }
}

TranslationMatrix read_translation_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open translation matrix '" + path + "'");
    Eigen::Index m, n;
    if (!(in >> m >> n) || m <= 0 || n <= 0) throw DataError("malformed translation matrix header");
    TranslationMatrix t;
    t.matrix.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(in >> t.matrix(i, j))) throw DataError("translation matrix file truncated");
        }
    }
    return t;
}

RankedPredictions rank_equivalents(const EmbeddingSpace& src, const EmbeddingSpace& dst, int k) {
    if (dst.empty()) throw DataError("destination space is empty");
    if (k < 1) throw ConfigError("rank_equivalents needs k >= 1");

    RankedPredictions out;
    out.k = k;

    std::vector<std::pair<std::string, Eigen::VectorXd>> dst_normed;
    for (const auto& [id, v] : dst.vectors()) {
        const double norm = v.norm();
        if (norm == 0.0) {
            out.excluded_zero_vectors.push_back(dst.name() + ":" + id);
            continue;
        }
        dst_normed.emplace_back(id, v / norm);
    }

    for (const auto& [sid, sv] : src.vectors()) {
        const double norm = sv.norm();
        if (norm == 0.0) {
            out.excluded_zero_vectors.push_back(src.name() + ":" + sid);
            continue;
        }
        const Eigen::VectorXd q = sv / norm;
        std::vector<std::pair<std::string, double>> scored;
        scored.reserve(dst_normed.size());
        for (const auto& [did, dv] : dst_normed) {
            scored.emplace_back(did, q.dot(dv));
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(scored.size()) > k) scored.resize(k);
        out.ranking[sid] = std::move(scored);
    }
    return out;
}

void write_predictions(const RankedPredictions& predictions, const std::string& path,
                       char delimiter) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "src_skill" << delimiter << "rank" << delimiter << "dst_skill" << delimiter
        << "similarity\n";
    out << std::setprecision(17);
    for (const auto& [src, ranked] : predictions.ranking) {
        int rank = 1;
        for (const auto& [dst, sim] : ranked) {
            out << src << delimiter << rank++ << delimiter << dst << delimiter << sim << '\n';
        }
    }
}

}  // namespace skillmap
