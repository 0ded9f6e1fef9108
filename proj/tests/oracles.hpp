// Independent brute-force oracles used only by tests. These deliberately
// avoid the library's SVD/eigen paths: rank comes from column-pivoted
// elimination, singular values of 2-row matrices from the closed-form
// eigenvalues of M M^T, and moments from identities or quadrature.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace oracles {

using Eigen::MatrixXd;

/// Numeric rank via Gaussian elimination with full column pivoting.
inline int brute_rank(MatrixXd M, double rel_tol = 1e-9) {
  const double scale = M.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  const double tol = rel_tol * scale;
  int rank = 0;
  const Eigen::Index rows = M.rows();
  const Eigen::Index cols = M.cols();
  Eigen::Index row = 0;
  while (row < rows && rank < cols) {
    // Largest remaining entry decides the pivot column.
    Eigen::Index pr = row, pc = rank;
    double best = 0.0;
    for (Eigen::Index i = row; i < rows; ++i) {
      for (Eigen::Index j = rank; j < cols; ++j) {
        if (std::abs(M(i, j)) > best) {
          best = std::abs(M(i, j));
          pr = i;
          pc = j;
        }
      }
    }
    if (best <= tol) break;
    M.row(row).swap(M.row(pr));
    M.col(rank).swap(M.col(pc));
    for (Eigen::Index i = row + 1; i < rows; ++i) {
      const double f = M(i, rank) / M(row, rank);
      M.row(i) -= f * M.row(row);
    }
    ++rank;
    ++row;
  }
  return rank;
}

/// Smallest k <= k_max with full-rank (B AB ... A^{k-1}B), or nullopt.
inline std::optional<int> brute_reachability_index(const MatrixXd& A, const MatrixXd& B,
                                                   int k_max) {
  const Eigen::Index d = A.rows();
  MatrixXd blocks(d, B.cols() * k_max);
  MatrixXd power = B;
  for (int k = 0; k < k_max; ++k) {
    blocks.middleCols(k * B.cols(), B.cols()) = power;
    if (brute_rank(blocks.leftCols((k + 1) * B.cols())) == d) return k + 1;
    power = A * power;
  }
  return std::nullopt;
}

/// Singular values of a 2-row matrix from the closed-form eigenvalues of the
/// symmetric 2x2 Gram matrix M M^T.
inline std::pair<double, double> sigma_extremes_2row(const MatrixXd& M) {
  const Eigen::Matrix2d G = M * M.transpose();
  const double tr = G(0, 0) + G(1, 1);
  const double det = G(0, 0) * G(1, 1) - G(0, 1) * G(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double lo = std::max(0.0, tr / 2.0 - disc);
  const double hi = tr / 2.0 + disc;
  return {std::sqrt(lo), std::sqrt(hi)};
}

/// E(chi^2_d)^2 = d(d+2): fourth moment of a standard Gaussian in R^d.
inline double gaussian_fourth_moment(int d) {
  return static_cast<double>(d) * (d + 2.0);
}

/// E||w||^4 for the uniform ball of radius rho via Simpson quadrature of
/// rho^4 integral_0^1 s^4 d s^{d-1} ds.
inline double ball_fourth_moment(int d, double rho, int panels = 2000) {
  auto f = [&](double s) { return std::pow(s, 4) * d * std::pow(s, d - 1); };
  const double h = 1.0 / panels;
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  }
  return std::pow(rho, 4) * acc * h / 3.0;
}

/// Random orthogonal matrix (QR of a Gaussian sample); test input, not an
/// oracle.
inline MatrixXd random_orthogonal(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  MatrixXd G(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) G(i, j) = normal(gen);
  }
  Eigen::HouseholderQR<MatrixXd> qr(G);
  MatrixXd Q = qr.householderQ();
  // Fix signs so columns are reproducible across runs of the same seed.
  for (int j = 0; j < d; ++j) {
    if (Q(0, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace oracles
