#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qstab/linalg.hpp"
#include "qstab/quantizer.hpp"

namespace qstab {

enum class PolicyKind { Quantized, BaselineSaturation };

struct ConditionCheck {
  std::string name;
  bool pass;
  double margin;  ///< signed distance to the pass boundary where one exists
};

/// Every hypothesis of the stabilization guarantee with numeric margins.
/// Failures are entries, not exceptions.
struct ConditionReport {
  int kappa = 0;
  double r_min = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double umax_min = 0.0;
  double umax = 0.0;
  double c4 = 0.0;
  std::vector<ConditionCheck> checks;

  bool all_pass() const;
  const ConditionCheck* find(std::string_view name) const;
};

/// Key-value text: one "name pass|fail margin" line per check, preceded by
/// the numeric summary fields.
std::string to_text(const ConditionReport& report);

/// Strict lower bound on the saturation radius:
/// sqrt(kappa) sigma_max(R_kappa(A,I)) c4^{1/4} / (cos phi - sin phi).
double min_radius(int kappa, double sigma_max_RI, double c4, double phi);

/// Lower bound on the control budget: r / sigma_min(R_kappa(A,B)).
double min_umax(double r, double sigma_min_RAB);

/// Implied drift-gap witness: r (cos phi - sin phi) - sqrt(kappa)
/// sigma_max(R_kappa(A,I)) c4^{1/4}. Positive iff r > min_radius.
double theoretical_drift_gap(double r, double phi, int kappa, double sigma_max_RI, double c4);

ConditionReport check_conditions(const LinearSystem& sys, const ReachabilityInfo& reach,
                                 const RadialQuantizer& q, double c4, double umax);

/// Variant that computes reachability itself and degrades to a failing
/// "reachable" entry (with unusable dependents) instead of throwing.
ConditionReport check_conditions(const LinearSystem& sys, const RadialQuantizer& q, double c4,
                                 double umax, int k_max = 0);

/// The kappa controls of one block, in application order, plus the norm of
/// the stacked vector they were cut from.
struct ControlBlock {
  std::vector<Vector> u_steps;
  double stacked_norm = 0.0;
};

/// ubar = -R_kappa(A,B)^+ A^kappa q(x) for the quantized kind; the baseline
/// replaces q(x) by sat_r(x).
ControlBlock plan_block(PolicyKind kind, const ReachabilityInfo& reach,
                        const Matrix& A_pow_kappa, const RadialQuantizer& q, const Vector& x);

}  // namespace qstab
