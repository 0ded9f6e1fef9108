#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qstab/linalg.hpp"
#include "qstab/noise.hpp"
#include "qstab/policy.hpp"
#include "qstab/quantizer.hpp"
#include "qstab/simulator.hpp"

namespace qstab {

enum class PolicyChoice { Quantized, Baseline, Both };

/// Noise model as written in the config; enough to rebuild it.
struct NoiseSpec {
  std::string kind;        ///< gaussian_isotropic | gaussian_diag | uniform_ball | user_table
  double param = 0.0;      ///< sigma or radius
  Vector variances;        ///< gaussian_diag only
  std::string table_file;  ///< user_table only
};

/// Flat key-value experiment description. "auto" for r resolves to
/// 1.1 * min_radius; "auto" for umax resolves to min_umax(r, sigma_min).
struct ExperimentConfig {
  int d = 0;
  int m = 0;
  Matrix A;
  Matrix B;
  Vector x0;
  bool r_auto = true;
  double r = 0.0;
  std::optional<double> phi_target;
  std::string bins_file;  ///< empty = design bins from phi_target
  NoiseSpec noise;
  PolicyChoice policy = PolicyChoice::Quantized;
  int runs = 1;
  int horizon = 200;
  std::uint64_t seed = 0;
  bool umax_auto = true;
  double umax = 0.0;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse(serialize(cfg)) reproduces every field.
std::string serialize_config(const ExperimentConfig& cfg);

NoiseModel make_noise_model(const NoiseSpec& spec, int d);

/// Fully resolved experiment: system, reachability, quantizer with final
/// radius, noise model, fourth-moment constant, control budget, and the
/// condition report they produce together.
struct ResolvedExperiment {
  LinearSystem sys;
  ReachabilityInfo reach;
  RadialQuantizer quantizer;
  NoiseModel noise;
  Vector x0;
  double c4;
  bool c4_is_analytic;
  double umax;
  PolicyChoice policy;
  int runs;
  int horizon;
  std::uint64_t seed;
  ConditionReport report;
};

/// Resolves "auto" fields and builds every artifact. The analytic fourth
/// moment is preferred; otherwise a 10^6-draw estimate from a fixed stream.
/// Throws NotReachableError for systems with no reachability index.
ResolvedExperiment resolve(const ExperimentConfig& cfg);

/// Condition report that degrades (failing "reachable" entry, NaN dependents)
/// instead of throwing on unreachable systems.
ConditionReport check_config(const ExperimentConfig& cfg);

const char* to_string(PolicyChoice policy);

}  // namespace qstab
