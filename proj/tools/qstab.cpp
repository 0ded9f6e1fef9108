// qstab: design radial quantizers, check stabilizability conditions, and run
// seeded Monte Carlo experiments for bounded-input quantized-state control.
//
// Exit codes: 0 success, 1 condition-check failure, 2 usage/parse error,
// 3 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qstab/config.hpp"
#include "qstab/errors.hpp"
#include "qstab/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out_path;
  bool force = false;
};

void add_common_options(CLI::App* cmd, CommandOptions& opts, bool with_sim_flags) {
  cmd->add_option("--config", opts.config_path, "Experiment config file")->required();
  cmd->add_option("--out", opts.out_path, "Output file (default: stdout)");
  if (with_sim_flags) {
    cmd->add_option("--seed", opts.seed, "Override the config seed");
    cmd->add_option("--runs", opts.runs, "Override the config run count");
    cmd->add_flag("--force", opts.force, "Simulate even when condition checks fail");
  }
}

qstab::ExperimentConfig load_with_overrides(const CommandOptions& opts) {
  qstab::ExperimentConfig cfg = qstab::load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.runs) {
    if (*opts.runs < 1) throw qstab::ConfigError("runs must be >= 1");
    cfg.runs = *opts.runs;
  }
  return cfg;
}

int env_thread_cap() {
  const char* value = std::getenv("QSTAB_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || parsed < 1) return 0;
  return static_cast<int>(parsed);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw qstab::ConfigError("cannot open output file " + path);
  }
  out << content;
}

qstab::RolloutSpec make_spec(const qstab::ResolvedExperiment& exp, qstab::PolicyKind kind) {
  return qstab::RolloutSpec{exp.sys,  exp.reach,   exp.quantizer, kind,
                            exp.noise, exp.x0,      exp.horizon,   exp.seed,
                            env_thread_cap()};
}

void print_drift_report(const char* label, const qstab::ResolvedExperiment& exp,
                        const qstab::EnsembleStats& stats) {
  const qstab::DriftReport report =
      qstab::drift_report(stats, exp.quantizer.r, exp.reach.kappa, exp.reach.sigma_max_RI,
                          exp.c4, exp.quantizer.phi);
  std::cerr << "# drift report (" << label << ")\n" << qstab::to_text(report);
}

int require_checks(const qstab::ResolvedExperiment& exp, bool force) {
  if (exp.report.all_pass() || force) return kExitOk;
  std::cerr << qstab::to_text(exp.report);
  std::cerr << "condition checks failed; pass --force to simulate anyway\n";
  return kExitCheckFailed;
}

int cmd_design(const CommandOptions& opts) {
  const qstab::ExperimentConfig cfg = load_with_overrides(opts);
  const qstab::ResolvedExperiment exp = qstab::resolve(cfg);
  const qstab::RadialQuantizer& q = exp.quantizer;

  std::ostringstream bins;
  qstab::save_bins(q, bins);
  std::ostream& summary = opts.out_path.empty() ? std::cerr : std::cout;
  write_output(opts.out_path, bins.str());

  const int n = static_cast<int>(q.directions.size());
  summary << "bins " << n << "\n";
  summary << "phi " << format_double(q.phi) << "\n";
  summary << "certified " << (q.certified ? "true" : "false") << "\n";
  summary << "control_alphabet " << exp.reach.kappa * (n + 1) << "\n";
  return kExitOk;
}

int cmd_check(const CommandOptions& opts) {
  const qstab::ExperimentConfig cfg = load_with_overrides(opts);
  const qstab::ConditionReport report = qstab::check_config(cfg);
  write_output(opts.out_path, qstab::to_text(report));
  return report.all_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_simulate(const CommandOptions& opts) {
  const qstab::ExperimentConfig cfg = load_with_overrides(opts);
  if (cfg.policy == qstab::PolicyChoice::Both) {
    throw qstab::ConfigError("simulate needs policy quantized or baseline; use compare for both");
  }
  const qstab::ResolvedExperiment exp = qstab::resolve(cfg);
  if (const int rc = require_checks(exp, opts.force); rc != kExitOk) return rc;

  const qstab::PolicyKind kind = cfg.policy == qstab::PolicyChoice::Quantized
                                     ? qstab::PolicyKind::Quantized
                                     : qstab::PolicyKind::BaselineSaturation;
  const qstab::EnsembleStats stats = qstab::ensemble(make_spec(exp, kind), exp.runs);

  std::string csv = "t,mean_sq_norm\n";
  for (std::size_t t = 0; t < stats.mean_sq_norm.size(); ++t) {
    csv += std::to_string(t) + "," + format_double(stats.mean_sq_norm[t]) + "\n";
  }
  write_output(opts.out_path, csv);
  print_drift_report(qstab::to_string(cfg.policy), exp, stats);
  return kExitOk;
}

int cmd_compare(const CommandOptions& opts) {
  const qstab::ExperimentConfig cfg = load_with_overrides(opts);
  const qstab::ResolvedExperiment exp = qstab::resolve(cfg);
  if (const int rc = require_checks(exp, opts.force); rc != kExitOk) return rc;

  // Same per-run substreams for both policies: the curves differ only by
  // policy (common random numbers).
  const qstab::EnsembleStats quantized =
      qstab::ensemble(make_spec(exp, qstab::PolicyKind::Quantized), exp.runs);
  const qstab::EnsembleStats baseline =
      qstab::ensemble(make_spec(exp, qstab::PolicyKind::BaselineSaturation), exp.runs);

  std::string csv = "t,msn_quantized,msn_baseline\n";
  for (std::size_t t = 0; t < quantized.mean_sq_norm.size(); ++t) {
    csv += std::to_string(t) + "," + format_double(quantized.mean_sq_norm[t]) + "," +
           format_double(baseline.mean_sq_norm[t]) + "\n";
  }
  write_output(opts.out_path, csv);
  print_drift_report("quantized", exp, quantized);
  print_drift_report("baseline", exp, baseline);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-alphabet radial quantization and bounded-input stabilization toolkit"};
  app.require_subcommand(1);

  CommandOptions design_opts;
  CommandOptions check_opts;
  CommandOptions simulate_opts;
  CommandOptions compare_opts;

  CLI::App* design = app.add_subcommand("design", "Design a radial bin set and export it");
  add_common_options(design, design_opts, /*with_sim_flags=*/false);
  CLI::App* check = app.add_subcommand("check", "Evaluate every stabilizability condition");
  add_common_options(check, check_opts, /*with_sim_flags=*/false);
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble for one policy");
  add_common_options(simulate, simulate_opts, /*with_sim_flags=*/true);
  CLI::App* compare =
      app.add_subcommand("compare", "Paired quantized-vs-baseline ensemble comparison");
  add_common_options(compare, compare_opts, /*with_sim_flags=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (design->parsed()) return cmd_design(design_opts);
    if (check->parsed()) return cmd_check(check_opts);
    if (simulate->parsed()) return cmd_simulate(simulate_opts);
    if (compare->parsed()) return cmd_compare(compare_opts);
    return kExitUsage;
  } catch (const qstab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qstab::DivergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::runtime_error& e) {
    // NotReachableError, SingularMatrixError, DesignFailure, NumericalFailure.
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
