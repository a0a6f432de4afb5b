#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "skillmap/errors.hpp"
#include "skillmap/tamf.hpp"

namespace fs = std::filesystem;
using namespace skillmap;

namespace {

EmbeddingSpace gaussian_content(const std::vector<std::string>& skills, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    EmbeddingSpace space("content", d);
    for (const auto& s : skills) {
        Eigen::VectorXd v(d);
        for (int i = 0; i < d; ++i) v[i] = g(rng);
        space.insert(s, v);
    }
    return space;
}

}  // namespace

TEST_CASE("ppmi matches brute force on random sequences") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(1, 10), tok(0, 4);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<std::vector<std::string>> seqs(4);
        for (auto& s : seqs) {
            const int n = len(rng);
            for (int i = 0; i < n; ++i) s.push_back("k" + std::to_string(tok(rng)));
        }
        std::vector<std::string> skills = {"k0", "k1", "k2", "k3", "k4"};
        const int window = 1 + trial % 3;
        PpmiMatrix got = build_ppmi(seqs, skills, window);

        std::map<std::pair<int, int>, double> pc;
        std::map<int, double> cc, xc;
        double total = 0;
        for (const auto& seq : seqs) {
            for (int i = 0; i < static_cast<int>(seq.size()); ++i) {
                for (int j = std::max(0, i - window);
                     j <= std::min<int>(static_cast<int>(seq.size()) - 1, i + window); ++j) {
                    if (j == i) continue;
                    const int a = seq[i][1] - '0', b = seq[j][1] - '0';
                    pc[{a, b}] += 1;
                    cc[a] += 1;
                    xc[b] += 1;
                    total += 1;
                }
            }
        }
        for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 5; ++c) {
                double want = 0.0;
                if (pc.count({r, c})) {
                    want = std::max(0.0, std::log(pc[{r, c}] * total / (cc[r] * xc[c])));
                }
                CHECK(std::abs(got.matrix(r, c) - want) <= 1e-12);
            }
        }
    }
}

TEST_CASE("ppmi skips unknown skills and round-trips through files") {
    std::vector<std::vector<std::string>> seqs = {{"a", "ghost", "b", "a"}, {"b", "a"}};
    PpmiMatrix m = build_ppmi(seqs, {"a", "b"}, 2);
    CHECK(m.skills == std::vector<std::string>{"a", "b"});
    CHECK(m.matrix.rows() == 2);

    const fs::path path = fs::temp_directory_path() / "skillmap_ppmi_rt.txt";
    write_ppmi(m, path.string());
    PpmiMatrix r = read_ppmi(path.string());
    fs::remove(path);
    CHECK(r.skills == m.skills);
    CHECK(r.window_size == m.window_size);
    CHECK(r.pair_count == m.pair_count);
    CHECK((r.matrix - m.matrix).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("loss trace never increases") {
    std::vector<std::string> skills;
    for (int i = 0; i < 9; ++i) skills.push_back("s" + std::to_string(i));
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        PpmiMatrix m;
        m.skills = skills;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.5);
        m.matrix = Eigen::MatrixXd::NullaryExpr(9, 9, [&]() { return u(rng); });
        m.pair_count = 50;
        TamfOptions opts;
        opts.k = 3;
        opts.lambda = 0.8;
        opts.seed = seed;
        opts.max_iterations = 20;
        TamfResult r = tamf_factorize(m, gaussian_content(skills, 5, seed + 100), opts);
        const auto& trace = r.factorization.loss_trace;
        REQUIRE(trace.size() >= 2);
        for (std::size_t i = 1; i < trace.size(); ++i) {
            CHECK(trace[i] <= trace[i - 1] * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("half-steps satisfy their normal equations") {
    std::vector<std::string> skills;
    for (int i = 0; i < 8; ++i) skills.push_back("s" + std::to_string(i));
    PpmiMatrix m;
    m.skills = skills;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    m.matrix = Eigen::MatrixXd::NullaryExpr(8, 8, [&]() { return u(rng); });
    m.pair_count = 10;
    TamfOptions opts;
    opts.k = 3;
    opts.lambda = 1.3;
    opts.seed = 2;
    opts.max_iterations = 15;
    TamfResult r = tamf_factorize(m, gaussian_content(skills, 4, 9), opts);
    const auto& f = r.factorization;
    const Eigen::MatrixXd A = f.H * f.T_content;
    // the final iteration ends with an H step, so only W's optimality is
    // guaranteed up to the last W update; re-solve W and compare losses
    const Eigen::MatrixXd lhs =
        2.0 * A * A.transpose() + f.lambda * Eigen::MatrixXd::Identity(f.k, f.k);
    const Eigen::MatrixXd w_opt = lhs.ldlt().solve(2.0 * A * m.matrix.transpose());
    const double got = tamf_loss(m.matrix, f.W, f.H, f.T_content, f.lambda);
    const double best = tamf_loss(m.matrix, w_opt, f.H, f.T_content, f.lambda);
    CHECK(best <= got * (1 + 1e-12));       // re-solving cannot do worse
    CHECK((got - best) / got < 1e-3);       // and the run had converged

    // gradients vanish at the respective half-step optima
    const Eigen::MatrixXd gw = tamf_grad_w(m.matrix, w_opt, f.H, f.T_content, f.lambda);
    CHECK(gw.cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, m.matrix.norm()));
}

TEST_CASE("output space stacks structure and content halves") {
    std::vector<std::string> skills = {"a", "b", "c", "d"};
    PpmiMatrix m;
    m.skills = skills;
    m.matrix = Eigen::MatrixXd::Constant(4, 4, 0.3);
    m.matrix.diagonal().setZero();
    m.pair_count = 12;
    TamfOptions opts;
    opts.k = 2;
    opts.seed = 1;
    TamfResult r = tamf_factorize(m, gaussian_content(skills, 3, 5), opts, "space");
    CHECK(r.space.dimension() == 4);  // 2k
    for (const auto& s : skills) CHECK(r.space.contains(s));
    const Eigen::MatrixXd HT = r.factorization.H * r.factorization.T_content;
    const Eigen::VectorXd v = r.space.at("b");
    CHECK((v.head(2) - r.factorization.W.col(1)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((v.tail(2) - HT.col(1)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("singular unregularized systems raise a numeric error with advice") {
    std::vector<std::string> skills = {"a", "b", "c"};
    PpmiMatrix m;
    m.skills = skills;
    m.matrix = Eigen::MatrixXd::Constant(3, 3, 0.5);
    m.pair_count = 9;
    // identical content columns make H T rank one; with k = 2 and
    // lambda = 0 the W-step system is singular
    EmbeddingSpace content("c", 2);
    for (const auto& s : skills) content.insert(s, Eigen::Vector2d(1.0, 1.0));
    TamfOptions opts;
    opts.k = 2;
    opts.lambda = 0.0;
    CHECK_THROWS_WITH_AS(tamf_factorize(m, content, opts), doctest::Contains("lambda"),
                         NumericError);
}
