#include "qstab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>

namespace qstab {

Matrix rotation2d(double theta) {
  Matrix R(2, 2);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  R << c, -s, s, c;
  return R;
}

LinearSystem::LinearSystem(Matrix A_in, Matrix B_in)
    : A(std::move(A_in)), B(std::move(B_in)), d(A.rows()), m(B.cols()) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw std::invalid_argument("LinearSystem: A must be square and nonempty");
  }
  if (B.rows() != A.rows() || B.cols() == 0) {
    throw std::invalid_argument("LinearSystem: B must have d rows and at least one column");
  }
  if (!A.allFinite() || !B.allFinite()) {
    throw std::invalid_argument("LinearSystem: matrix entries must be finite");
  }
}

Matrix reachability_matrix(const Matrix& A, const Matrix& M, int k) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw std::invalid_argument("reachability_matrix: A must be square");
  }
  if (M.rows() != A.rows() || M.cols() == 0) {
    throw std::invalid_argument("reachability_matrix: M must have as many rows as A");
  }
  if (k < 1) {
    throw std::invalid_argument("reachability_matrix: k must be >= 1");
  }
  const Eigen::Index d = A.rows();
  const Eigen::Index m = M.cols();
  Matrix out(d, static_cast<Eigen::Index>(k) * m);
  Matrix power = M;  // A^j M, growing j
  for (int j = k - 1; j >= 0; --j) {
    out.middleCols(static_cast<Eigen::Index>(j) * m, m) = power;
    if (j > 0) power = A * power;
  }
  return out;
}

SingularExtremes singular_extremes(const Matrix& M) {
  if (M.size() == 0) {
    throw std::invalid_argument("singular_extremes: empty matrix");
  }
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& vals = svd.singularValues();
  return {vals(vals.size() - 1), vals(0)};
}

int numeric_rank(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& vals = svd.singularValues();
  if (vals.size() == 0 || vals(0) == 0.0) return 0;
  const double cutoff = kRankTolerance * vals(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) > cutoff) ++rank;
  }
  return rank;
}

int numeric_rank(const Eigen::MatrixXcd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& vals = svd.singularValues();
  if (vals.size() == 0 || vals(0) == 0.0) return 0;
  const double cutoff = kRankTolerance * vals(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) > cutoff) ++rank;
  }
  return rank;
}

int reachability_index(const LinearSystem& sys, int k_max) {
  if (k_max == 0) k_max = static_cast<int>(sys.d);
  if (k_max < 1) {
    throw std::invalid_argument("reachability_index: k_max must be >= 1");
  }
  for (int k = 1; k <= k_max; ++k) {
    if (numeric_rank(reachability_matrix(sys.A, sys.B, k)) == sys.d) {
      return k;
    }
  }
  throw NotReachableError("reachability_index: rank(R_k(A,B)) < d for all k <= " +
                          std::to_string(k_max));
}

Matrix pseudoinverse(const Matrix& M) {
  if (M.size() == 0) {
    throw std::invalid_argument("pseudoinverse: empty matrix");
  }
  if (M.rows() > M.cols()) {
    throw SingularMatrixError("pseudoinverse: more rows than columns, row rank cannot be full");
  }
  const SingularExtremes ext = singular_extremes(M);
  if (ext.sigma_max == 0.0 || ext.sigma_min <= kRankTolerance * ext.sigma_max) {
    throw SingularMatrixError("pseudoinverse: matrix is row-rank deficient");
  }
  Eigen::LLT<Matrix> llt(M * M.transpose());
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("pseudoinverse: M M^T is not positive definite");
  }
  return llt.solve(M).transpose();
}

Matrix matrix_power(const Matrix& A, int k) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("matrix_power: A must be square");
  }
  if (k < 0) {
    throw std::invalid_argument("matrix_power: k must be >= 0");
  }
  Matrix out = Matrix::Identity(A.rows(), A.cols());
  for (int i = 0; i < k; ++i) out = out * A;
  return out;
}

namespace {

struct EigenvalueCluster {
  std::complex<double> center;
  int count = 0;
};

std::vector<EigenvalueCluster> cluster_eigenvalues(const Eigen::VectorXcd& lam) {
  std::vector<EigenvalueCluster> clusters;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    bool placed = false;
    for (auto& c : clusters) {
      if (std::abs(lam(i) - c.center) <= kEigenvalueClusterRadius) {
        ++c.count;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({lam(i), 1});
  }
  return clusters;
}

}  // namespace

StabilityReport stability_report(const Matrix& A, double tol) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw std::invalid_argument("stability_report: A must be square and nonempty");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("stability_report: tol must be positive");
  }
  Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("stability_report: eigenvalue iteration did not converge");
  }
  const Eigen::VectorXcd lam = solver.eigenvalues();

  StabilityReport report;
  report.eigenvalue_magnitudes.reserve(static_cast<std::size_t>(lam.size()));
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    report.eigenvalue_magnitudes.push_back(std::abs(lam(i)));
  }
  std::sort(report.eigenvalue_magnitudes.begin(), report.eigenvalue_magnitudes.end(),
            std::greater<>());

  const Eigen::Index d = A.rows();
  report.orthogonality_defect =
      (A.transpose() * A - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  report.orthogonal = report.orthogonality_defect <= tol;

  bool stable = true;
  for (double mag : report.eigenvalue_magnitudes) {
    if (mag > 1.0 + tol) stable = false;
  }
  if (stable) {
    // Unit-circle eigenvalues must be semisimple: geometric multiplicity
    // (kernel dimension of A - lambda I) equal to the cluster size.
    for (const auto& c : cluster_eigenvalues(lam)) {
      if (std::abs(c.center) < 1.0 - tol) continue;
      Eigen::MatrixXcd shifted = A.cast<std::complex<double>>();
      shifted.diagonal().array() -= c.center;
      const int geometric = static_cast<int>(d) - numeric_rank(shifted);
      if (geometric != c.count) {
        stable = false;
        break;
      }
    }
  }
  report.lyapunov_stable = stable;
  return report;
}

ReachabilityInfo compute_reachability(const LinearSystem& sys, int k_max) {
  ReachabilityInfo info;
  info.kappa = reachability_index(sys, k_max);
  info.Rk_AB = reachability_matrix(sys.A, sys.B, info.kappa);
  info.Rk_AB_pinv = pseudoinverse(info.Rk_AB);
  const SingularExtremes ext = singular_extremes(info.Rk_AB);
  info.sigma_min = ext.sigma_min;
  info.sigma_max = ext.sigma_max;
  info.sigma_max_RI =
      singular_extremes(reachability_matrix(sys.A, Matrix::Identity(sys.d, sys.d), info.kappa))
          .sigma_max;
  info.m = sys.m;

  const double defect = (info.Rk_AB * info.Rk_AB_pinv - Matrix::Identity(sys.d, sys.d))
                            .cwiseAbs()
                            .maxCoeff();
  if (!(defect <= 1e-9)) {
    throw NumericalFailure("compute_reachability: pseudoinverse residual " +
                           std::to_string(defect) + " exceeds 1e-9");
  }
  return info;
}

}  // namespace qstab
