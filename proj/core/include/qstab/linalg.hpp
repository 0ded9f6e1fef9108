#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qstab/errors.hpp"

namespace qstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A singular value counts as nonzero iff it exceeds this fraction of the
/// largest one (scale-invariant numeric rank).
inline constexpr double kRankTolerance = 1e-9;

/// Default tolerance for stability / orthogonality diagnostics.
inline constexpr double kStabilityTolerance = 1e-9;

/// Eigenvalues closer than this are treated as one cluster when checking
/// multiplicities on the unit circle.
inline constexpr double kEigenvalueClusterRadius = 1e-7;

/// 2x2 counter-clockwise rotation by theta radians.
Matrix rotation2d(double theta);

/// x_{t+1} = A x_t + B u_t + w_t. Validates shapes and finiteness once at
/// construction; operations downstream assume a well-formed system.
struct LinearSystem {
  LinearSystem(Matrix A, Matrix B);

  Matrix A;
  Matrix B;
  Eigen::Index d;  ///< state dimension
  Eigen::Index m;  ///< input dimension
};

/// (A^{k-1} M  ...  A M  M), a rows(A) x (k * cols(M)) concatenation.
Matrix reachability_matrix(const Matrix& A, const Matrix& M, int k);

/// Smallest kappa <= k_max with rank(R_kappa(A,B)) = d. k_max = 0 means d.
/// Throws NotReachableError when no such kappa exists.
int reachability_index(const LinearSystem& sys, int k_max = 0);

/// M^T (M M^T)^{-1} for full-row-rank M. Throws SingularMatrixError when the
/// smallest row-space singular value is below the rank tolerance.
Matrix pseudoinverse(const Matrix& M);

struct SingularExtremes {
  double sigma_min;  ///< smallest of the min(rows, cols) singular values
  double sigma_max;
};

SingularExtremes singular_extremes(const Matrix& M);

/// Numeric rank: singular values above kRankTolerance * sigma_max.
int numeric_rank(const Matrix& M);
int numeric_rank(const Eigen::MatrixXcd& M);

/// A^k by repeated multiplication, k >= 0.
Matrix matrix_power(const Matrix& A, int k);

struct StabilityReport {
  std::vector<double> eigenvalue_magnitudes;  ///< sorted descending
  bool lyapunov_stable;
  bool orthogonal;
  double orthogonality_defect;  ///< max-abs entry of A^T A - I
};

/// Eigenvalue magnitudes, Lyapunov-stability verdict (unit-circle eigenvalues
/// must be semisimple), and orthogonality defect. Diagnostics only; nothing
/// downstream consumes eigenvectors.
StabilityReport stability_report(const Matrix& A, double tol = kStabilityTolerance);

/// Reachability data for a system at its index kappa: the block matrix, its
/// pseudoinverse, singular extremes, and sigma_max of R_kappa(A, I).
struct ReachabilityInfo {
  int kappa;
  Matrix Rk_AB;       ///< d x (kappa m)
  Matrix Rk_AB_pinv;  ///< (kappa m) x d
  double sigma_min;
  double sigma_max;
  double sigma_max_RI;
  Eigen::Index m;  ///< input dimension, so blocks of Rk_AB can be addressed
};

/// Computes kappa and the derived matrices. Verifies Rk_AB * pinv = I within
/// 1e-9 and throws NumericalFailure otherwise.
ReachabilityInfo compute_reachability(const LinearSystem& sys, int k_max = 0);

}  // namespace qstab
