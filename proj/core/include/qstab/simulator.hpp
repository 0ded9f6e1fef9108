#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qstab/linalg.hpp"
#include "qstab/noise.hpp"
#include "qstab/policy.hpp"
#include "qstab/quantizer.hpp"

namespace qstab {

/// A run is aborted once the state norm crosses this guard; that is a
/// configuration problem, not statistical fluctuation.
inline constexpr double kDivergenceGuard = 1e12;

/// One closed-loop path. Re-simulating from the stored seed reproduces it
/// bitwise on the same build.
struct Trajectory {
  std::vector<Vector> states;    ///< x_0 .. x_T
  std::vector<Vector> controls;  ///< u_0 .. u_{T-1}
  std::vector<Vector> noise;     ///< w_0 .. w_{T-1}, only when recorded
  std::uint64_t seed = 0;
};

/// (||x_{kappa t}||, ||x_{kappa(t+1)}|| - ||x_{kappa t}||) at one block time.
struct DriftSample {
  double norm_before;
  double delta;
};

/// Per-time-step aggregates over seeded runs. Reductions happen in run-index
/// order, so the result does not depend on scheduling.
struct EnsembleStats {
  int runs = 0;
  std::vector<double> mean_sq_norm;        ///< average ||x_t||^2, length T+1
  double max_control_norm = 0.0;           ///< max per-step ||u_t||
  double max_block_norm = 0.0;             ///< max stacked-block norm
  std::vector<DriftSample> drift_samples;  ///< pooled over runs, block times only
  double fourth_diff_max = 0.0;            ///< max |delta|^4 observed
  double max_initial_norm = 0.0;
};

/// Empirical standing of the two supermartingale hypotheses behind the
/// guarantee: negative conditional drift outside the r-ball and a bounded
/// fourth difference.
struct DriftReport {
  bool sufficient = false;  ///< at least 30 conditioning samples
  std::int64_t samples = 0;
  double conditional_drift_mean = 0.0;
  double standard_error = 0.0;
  double b_theoretical = 0.0;
  double fourth_moment_bound_observed = 0.0;
  double j_bound = 0.0;  ///< max{||x_0||, r}
};

std::string to_text(const DriftReport& report);

/// x_{t+1} = A x + B u + w.
Vector step(const LinearSystem& sys, const Vector& x, const Vector& u, const Vector& w);

/// Closed-loop rollout: a fresh control block every kappa steps, fresh noise
/// every step. The horizon is truncated to the last full block. Throws
/// DivergedError (with the time index) past the divergence guard.
Trajectory rollout(const LinearSystem& sys, const ReachabilityInfo& reach,
                   const RadialQuantizer& q, PolicyKind kind, const NoiseModel& noise,
                   const Vector& x0, int horizon, std::uint64_t seed,
                   bool record_noise = false);

/// Everything one ensemble needs. Per-run noise comes from
/// substream(seed, run_index), so members are reproducible independently.
struct RolloutSpec {
  LinearSystem sys;
  ReachabilityInfo reach;
  RadialQuantizer q;
  PolicyKind kind;
  NoiseModel noise;
  Vector x0;
  int horizon = 200;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0 = hardware concurrency
};

/// Monte Carlo ensemble of independent seeded rollouts. The aggregate is a
/// pure function of (spec, runs): thread count only changes scheduling.
EnsembleStats ensemble(const RolloutSpec& spec, int runs);

/// Conditional drift over {||x_{kappa t}|| > r} with standard error, the
/// theoretical gap b, and the observed fourth-difference bound.
DriftReport drift_report(const EnsembleStats& stats, double r, int kappa, double sigma_max_RI,
                         double c4, double phi);

}  // namespace qstab
