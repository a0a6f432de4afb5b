#include "skillmap/tamf.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "skillmap/errors.hpp"

namespace skillmap {

PpmiMatrix build_ppmi(const std::vector<std::vector<std::string>>& sequences,
                      const std::vector<std::string>& skills, int window_size) {
    if (sequences.empty()) throw DataError("cannot build PPMI from an empty sequence list");
    if (window_size < 1) throw ConfigError("PPMI window_size must be >= 1");

    std::map<std::string, int> index;
    for (int i = 0; i < static_cast<int>(skills.size()); ++i) index[skills[i]] = i;
    const int n = static_cast<int>(skills.size());

    Eigen::MatrixXd pair_counts = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd center_counts = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd context_counts = Eigen::VectorXd::Zero(n);
    std::size_t total_pairs = 0;

    for (const auto& seq : sequences) {
        const int len = static_cast<int>(seq.size());
        for (int i = 0; i < len; ++i) {
            auto ci = index.find(seq[i]);
            if (ci == index.end()) continue;
            const int lo = std::max(0, i - window_size);
            const int hi = std::min(len - 1, i + window_size);
            for (int j = lo; j <= hi; ++j) {
                if (j == i) continue;
                auto cj = index.find(seq[j]);
                if (cj == index.end()) continue;
                pair_counts(ci->second, cj->second) += 1.0;
                center_counts[ci->second] += 1.0;
                context_counts[cj->second] += 1.0;
                ++total_pairs;
            }
        }
    }

    PpmiMatrix out;
    out.skills = skills;
    out.window_size = window_size;
    out.pair_count = total_pairs;
    out.matrix = Eigen::MatrixXd::Zero(n, n);
    if (total_pairs == 0) return out;
    for (int s = 0; s < n; ++s) {
        for (int c = 0; c < n; ++c) {
            if (pair_counts(s, c) == 0.0) continue;
            const double pmi = std::log(pair_counts(s, c) * static_cast<double>(total_pairs) /
                                        (center_counts[s] * context_counts[c]));
            out.matrix(s, c) = std::max(0.0, pmi);
        }
    }
    return out;
}

namespace {
std::string escape_id(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        if (c == ' ') c = '_';
    }
    return out;
}
}  // namespace

void write_ppmi(const PpmiMatrix& ppmi, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << ppmi.skills.size() << ' ' << ppmi.window_size << ' ' << ppmi.pair_count << '\n';
    for (const auto& s : ppmi.skills) out << escape_id(s) << '\n';
    out << std::setprecision(17);
    const int n = static_cast<int>(ppmi.skills.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (ppmi.matrix(i, j) != 0.0) {
                out << escape_id(ppmi.skills[i]) << ' ' << escape_id(ppmi.skills[j]) << ' '
                    << ppmi.matrix(i, j) << '\n';
            }
        }
    }
}

PpmiMatrix read_ppmi(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open PPMI file '" + path + "'");
    std::size_t n_skills, pair_count;
    int window;
    if (!(in >> n_skills >> window >> pair_count)) throw DataError("malformed PPMI header");
    PpmiMatrix out;
    out.window_size = window;
    out.pair_count = pair_count;
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < n_skills; ++i) {
        std::string s;
        if (!(in >> s)) throw DataError("PPMI file truncated in skill list");
        index[s] = static_cast<int>(i);
        out.skills.push_back(s);
    }
    out.matrix = Eigen::MatrixXd::Zero(static_cast<int>(n_skills), static_cast<int>(n_skills));
    std::string row, col;
    double value;
    while (in >> row >> col >> value) {
        auto ri = index.find(row);
        auto ci = index.find(col);
        if (ri == index.end() || ci == index.end()) {
            throw DataError("PPMI triplet references unknown skill");
        }
        out.matrix(ri->second, ci->second) = value;
    }
    return out;
}

double tamf_loss(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                 const Eigen::MatrixXd& T, double lambda) {
    const double fit = (M - W.transpose() * H * T).squaredNorm();
    return fit + 0.5 * lambda * (W.squaredNorm() + H.squaredNorm());
}

Eigen::MatrixXd tamf_grad_w(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& H, const Eigen::MatrixXd& T, double lambda) {
    const Eigen::MatrixXd A = H * T;  // k x |S|
    return 2.0 * A * (A.transpose() * W - M.transpose()) + lambda * W;
}

Eigen::MatrixXd tamf_grad_h(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& H, const Eigen::MatrixXd& T, double lambda) {
    return 2.0 * W * (W.transpose() * H * T - M) * T.transpose() + lambda * H;
}

TamfResult tamf_factorize(const PpmiMatrix& ppmi, const EmbeddingSpace& content,
                          const TamfOptions& options, const std::string& space_name) {
    const int n = static_cast<int>(ppmi.skills.size());
    if (options.k < 1) throw ConfigError("TAMF k must be >= 1");
    if (n == 0) throw DataError("PPMI matrix has no skills");

    const int d = content.dimension();
    Eigen::MatrixXd T(d, n);
    for (int i = 0; i < n; ++i) {
        T.col(i) = content.at(ppmi.skills[i]);  // throws when content does not cover a skill
        if (options.normalize_content) {
            const double norm = T.col(i).norm();
            if (norm > 0.0) T.col(i) /= norm;
        }
    }

    const int k = options.k;
    const double lambda = options.lambda;
    const Eigen::MatrixXd& M = ppmi.matrix;

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> init(-0.5 / k, 0.5 / k);
    Eigen::MatrixXd W(k, n), H(k, d);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < k; ++i) W(i, j) = init(rng);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < k; ++i) H(i, j) = init(rng);

    const Eigen::MatrixXd TTt = T * T.transpose();  // d x d

    std::vector<double> trace;
    double loss = tamf_loss(M, W, H, T, lambda);
    trace.push_back(loss);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        // W step: (2 A A^T + lambda I) W = 2 A M^T, A = H T
        {
            const Eigen::MatrixXd A = H * T;
            Eigen::MatrixXd lhs = 2.0 * A * A.transpose();
            lhs.diagonal().array() += lambda;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
            if (!lu.isInvertible()) {
                throw NumericError("W-step normal equations singular; try lambda > 0");
            }
            W = lu.solve(2.0 * A * M.transpose());
        }
        trace.push_back(tamf_loss(M, W, H, T, lambda));

        // H step: 2 W W^T H (T T^T) + lambda H = 2 W M T^T, solved via
        // vectorization over the k*d unknowns
        {
            const Eigen::MatrixXd WWt = 2.0 * W * W.transpose();  // k x k
            Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k * d, k * d);
            for (int j2 = 0; j2 < d; ++j2) {
                for (int j1 = 0; j1 < d; ++j1) {
                    // vec(A H B) = (B^T kron A) vec(H); B = TTt is symmetric
                    sys.block(j1 * k, j2 * k, k, k) = TTt(j2, j1) * WWt;
                }
            }
            sys.diagonal().array() += lambda;
            const Eigen::MatrixXd rhs_mat = 2.0 * W * M * T.transpose();  // k x d
            Eigen::Map<const Eigen::VectorXd> rhs(rhs_mat.data(), k * d);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
            if (!lu.isInvertible()) {
                throw NumericError("H-step linear system singular; try lambda > 0");
            }
            const Eigen::VectorXd h = lu.solve(rhs);
            H = Eigen::Map<const Eigen::MatrixXd>(h.data(), k, d);
        }
        const double new_loss = tamf_loss(M, W, H, T, lambda);
        trace.push_back(new_loss);
        if (!std::isfinite(new_loss)) throw NumericError("TAMF loss became non-finite");

        const double rel_decrease = (loss - new_loss) / std::max(loss, 1e-300);
        loss = new_loss;
        if (rel_decrease >= 0.0 && rel_decrease < options.tolerance) break;
    }

    TamfResult result;
    result.factorization.W = W;
    result.factorization.H = H;
    result.factorization.T_content = T;
    result.factorization.k = k;
    result.factorization.lambda = lambda;
    result.factorization.loss_trace = std::move(trace);

    const Eigen::MatrixXd HT = H * T;
    EmbeddingSpace space(space_name, 2 * k,
                         Provenance{"tamf", false,
                                    "k=" + std::to_string(k) + " lambda=" + std::to_string(lambda)});
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd v(2 * k);
        v.head(k) = W.col(i);
        v.tail(k) = HT.col(i);
        space.insert(ppmi.skills[i], v);
    }
    result.space = std::move(space);
    return result;
}

}  // namespace skillmap
