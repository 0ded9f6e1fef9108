#include "qstab/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace qstab {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void append_kv(std::string& out, const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s %.17g\n", key, v);
  out += buf;
}

}  // namespace

bool ConditionReport::all_pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck* ConditionReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string to_text(const ConditionReport& report) {
  std::string out;
  out += "kappa " + std::to_string(report.kappa) + "\n";
  append_kv(out, "r_min", report.r_min);
  append_kv(out, "r", report.r);
  append_kv(out, "phi", report.phi);
  append_kv(out, "umax_min", report.umax_min);
  append_kv(out, "umax", report.umax);
  append_kv(out, "c4", report.c4);
  for (const auto& c : report.checks) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s %s %.17g\n", c.name.c_str(),
                  c.pass ? "pass" : "fail", c.margin);
    out += buf;
  }
  out += std::string("overall ") + (report.all_pass() ? "pass" : "fail") + "\n";
  return out;
}

double min_radius(int kappa, double sigma_max_RI, double c4, double phi) {
  if (kappa < 1) {
    throw std::invalid_argument("min_radius: kappa must be >= 1");
  }
  if (!(sigma_max_RI >= 0.0)) {
    throw std::invalid_argument("min_radius: sigma_max_RI must be >= 0");
  }
  if (!(c4 >= 0.0) || !std::isfinite(c4)) {
    throw std::invalid_argument("min_radius: c4 must be finite and >= 0");
  }
  if (!(phi >= 0.0) || !(phi < kQuarterPi)) {
    throw std::invalid_argument("min_radius: phi must lie in [0, pi/4)");
  }
  return std::sqrt(static_cast<double>(kappa)) * sigma_max_RI * std::pow(c4, 0.25) /
         (std::cos(phi) - std::sin(phi));
}

double min_umax(double r, double sigma_min_RAB) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("min_umax: r must be positive");
  }
  if (!(sigma_min_RAB > 0.0)) {
    throw NotReachableError("min_umax: sigma_min(R_kappa(A,B)) must be positive");
  }
  return r / sigma_min_RAB;
}

double theoretical_drift_gap(double r, double phi, int kappa, double sigma_max_RI, double c4) {
  return r * (std::cos(phi) - std::sin(phi)) -
         std::sqrt(static_cast<double>(kappa)) * sigma_max_RI * std::pow(c4, 0.25);
}

namespace {

ConditionReport build_report(const LinearSystem& sys, const ReachabilityInfo* reach,
                             const RadialQuantizer& q, double c4, double umax) {
  ConditionReport rep;
  rep.r = q.r;
  rep.phi = q.phi;
  rep.umax = umax;
  rep.c4 = c4;

  const StabilityReport stab = stability_report(sys.A);
  const bool noise_ok = std::isfinite(c4) && c4 >= 0.0;
  const bool phi_ok = q.phi >= 0.0 && q.phi < kQuarterPi;

  double reach_margin = kNaN;
  if (reach != nullptr) {
    rep.kappa = reach->kappa;
    reach_margin = reach->sigma_min - kRankTolerance * reach->sigma_max;
    rep.r_min = (phi_ok && noise_ok) ? min_radius(reach->kappa, reach->sigma_max_RI, c4, q.phi)
                                     : std::numeric_limits<double>::infinity();
    rep.umax_min = reach->sigma_min > 0.0 ? q.r / reach->sigma_min
                                          : std::numeric_limits<double>::infinity();
  } else {
    rep.kappa = 0;
    rep.r_min = kNaN;
    rep.umax_min = kNaN;
  }

  rep.checks.push_back({"orthogonal_A", stab.orthogonal,
                        kStabilityTolerance - stab.orthogonality_defect});
  rep.checks.push_back({"reachable", reach != nullptr, reach_margin});
  rep.checks.push_back({"phi_admissible", phi_ok, kQuarterPi - q.phi});
  rep.checks.push_back(
      {"radius_condition", std::isfinite(rep.r_min) && q.r > rep.r_min, q.r - rep.r_min});
  rep.checks.push_back({"umax_condition",
                        std::isfinite(rep.umax_min) && std::isfinite(umax) && umax >= rep.umax_min,
                        umax - rep.umax_min});
  rep.checks.push_back({"noise_moment_finite", noise_ok, c4});
  return rep;
}

}  // namespace

ConditionReport check_conditions(const LinearSystem& sys, const ReachabilityInfo& reach,
                                 const RadialQuantizer& q, double c4, double umax) {
  return build_report(sys, &reach, q, c4, umax);
}

ConditionReport check_conditions(const LinearSystem& sys, const RadialQuantizer& q, double c4,
                                 double umax, int k_max) {
  try {
    const ReachabilityInfo reach = compute_reachability(sys, k_max);
    return build_report(sys, &reach, q, c4, umax);
  } catch (const NotReachableError&) {
    return build_report(sys, nullptr, q, c4, umax);
  }
}

ControlBlock plan_block(PolicyKind kind, const ReachabilityInfo& reach,
                        const Matrix& A_pow_kappa, const RadialQuantizer& q, const Vector& x) {
  if (x.size() != A_pow_kappa.rows() || A_pow_kappa.rows() != reach.Rk_AB.rows()) {
    throw std::invalid_argument("plan_block: dimension mismatch");
  }
  const Vector target = kind == PolicyKind::Quantized ? quantize(q, x) : sat(q.r, x);
  const Vector stacked = -(reach.Rk_AB_pinv * (A_pow_kappa * target));

  ControlBlock block;
  block.stacked_norm = stacked.norm();
  block.u_steps.reserve(static_cast<std::size_t>(reach.kappa));
  for (int j = 0; j < reach.kappa; ++j) {
    block.u_steps.push_back(stacked.segment(static_cast<Eigen::Index>(j) * reach.m, reach.m));
  }
  return block;
}

}  // namespace qstab
