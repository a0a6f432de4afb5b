#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skillmap/embedding.hpp"

namespace skillmap {

/// Positive pointwise mutual information over (center, context) skill
/// pairs within a window: M[s,c] = max(0, ln(#(s,c) * |P| / (#(s) * #(c)))).
struct PpmiMatrix {
    std::vector<std::string> skills;
    Eigen::MatrixXd matrix;  // |S| x |S|
    int window_size = 0;
    std::size_t pair_count = 0;  // |P|, total observed pairs
};

PpmiMatrix build_ppmi(const std::vector<std::vector<std::string>>& sequences,
                      const std::vector<std::string>& skills, int window_size);

/// Sparse triplet text format: "row_skill col_skill value", nonzero
/// entries only, preceded by a header "<|S|> <window> <|P|>" and the skill
/// list.
void write_ppmi(const PpmiMatrix& ppmi, const std::string& path);
PpmiMatrix read_ppmi(const std::string& path);

struct TamfOptions {
    int k = 25;               // half embedding dimension
    double lambda = 1.0;      // regularization coefficient
    double tolerance = 1e-4;  // relative loss decrease stopping threshold
    int max_iterations = 100;
    std::uint64_t seed = 1;
    bool normalize_content = true;  // unit-normalize content matrix columns
};

/// Loss ||M - W^T H T||_F^2 + (lambda/2)(||W||_F^2 + ||H||_F^2), minimized
/// by alternating exact half-steps: the W step solves
/// (2 A A^T + lambda I) W = 2 A M^T with A = H T; the H step solves the
/// coupled linear system 2 W W^T H (T T^T) + lambda H = 2 W M T^T by
/// vectorization over the k*d unknowns.
struct TamfFactorization {
    Eigen::MatrixXd W;          // k x |S|
    Eigen::MatrixXd H;          // k x d
    Eigen::MatrixXd T_content;  // d x |S| (after optional column normalization)
    int k = 0;
    double lambda = 0.0;
    std::vector<double> loss_trace;  // one value per half-step, non-increasing
};

struct TamfResult {
    EmbeddingSpace space;  // rows of [W^T, (H T)^T], dimension 2k
    TamfFactorization factorization;
};

TamfResult tamf_factorize(const PpmiMatrix& ppmi, const EmbeddingSpace& content,
                          const TamfOptions& options, const std::string& space_name = "tamf");

double tamf_loss(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W, const Eigen::MatrixXd& H,
                 const Eigen::MatrixXd& T, double lambda);

/// Analytic gradients of the TAMF loss, used by the finite-difference checks.
Eigen::MatrixXd tamf_grad_w(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& H, const Eigen::MatrixXd& T, double lambda);
Eigen::MatrixXd tamf_grad_h(const Eigen::MatrixXd& M, const Eigen::MatrixXd& W,
                            const Eigen::MatrixXd& H, const Eigen::MatrixXd& T, double lambda);

}  // namespace skillmap
