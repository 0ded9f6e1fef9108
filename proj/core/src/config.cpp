#include "qstab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace qstab {

namespace {

constexpr std::int64_t kC4EstimateDraws = 1000000;
constexpr std::uint64_t kC4EstimateSeed = 0xC4E5717A7E5EEDull;
constexpr double kAutoRadiusFactor = 1.1;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_bracket_list(const std::string& key, const std::string& value) {
  std::string body = value;
  const auto open = body.find('[');
  const auto close = body.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw ConfigError("config: " + key + " expects a bracketed row-major list");
  }
  body = body.substr(open + 1, close - open - 1);
  std::istringstream in(body);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    throw ConfigError("config: " + key + " contains a non-numeric entry");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
  }
  if (pos != value.size()) {
    throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an integer, got '" + value + "'");
  }
  if (pos != value.size()) {
    throw ConfigError("config: " + key + " expects an integer, got '" + value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " expects an unsigned integer, got '" + value + "'");
  }
  if (pos != value.size()) {
    throw ConfigError("config: " + key + " expects an unsigned integer, got '" + value + "'");
  }
  return v;
}

std::string first_token(const std::string& s, std::string& rest) {
  std::istringstream in(s);
  std::string tok;
  in >> tok;
  std::getline(in, rest);
  const auto beg = rest.find_first_not_of(" \t");
  rest = beg == std::string::npos ? std::string() : rest.substr(beg);
  const auto end = rest.find_last_not_of(" \t\r");
  if (end != std::string::npos) rest = rest.substr(0, end + 1);
  return tok;
}

}  // namespace

NoiseModel make_noise_model(const NoiseSpec& spec, int d) {
  if (spec.kind == "gaussian_isotropic") {
    return NoiseModel::gaussian_isotropic(d, spec.param);
  }
  if (spec.kind == "gaussian_diag") {
    if (spec.variances.size() != d) {
      throw ConfigError("config: gaussian_diag needs exactly d variances");
    }
    return NoiseModel::gaussian_diag(spec.variances);
  }
  if (spec.kind == "uniform_ball") {
    return NoiseModel::uniform_ball(d, spec.param);
  }
  if (spec.kind == "user_table") {
    std::ifstream in(spec.table_file);
    if (!in) {
      throw ConfigError("config: cannot open noise table " + spec.table_file);
    }
    std::vector<Vector> rows;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::vector<double> vals;
      double v = 0.0;
      while (ls >> v) vals.push_back(v);
      if (vals.empty()) continue;
      if (static_cast<int>(vals.size()) != d) {
        throw ConfigError("config: noise table rows must have d entries");
      }
      rows.push_back(Eigen::Map<Vector>(vals.data(), d));
    }
    if (rows.empty()) {
      throw ConfigError("config: noise table " + spec.table_file + " is empty");
    }
    return NoiseModel::user_table(std::move(rows));
  }
  throw ConfigError("config: unknown noise kind '" + spec.kind + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string rest;
    const std::string key = first_token(line, rest);
    if (key.empty()) continue;
    if (kv.count(key)) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }
    kv[key] = rest;
  }

  auto require = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) {
      throw ConfigError(std::string("config: missing key '") + key + "'");
    }
    return it->second;
  };

  ExperimentConfig cfg;
  cfg.d = static_cast<int>(parse_int("d", require("d")));
  cfg.m = static_cast<int>(parse_int("m", require("m")));
  if (cfg.d < 1 || cfg.m < 1) {
    throw ConfigError("config: d and m must be >= 1");
  }

  const auto a_vals = parse_bracket_list("A", require("A"));
  if (static_cast<int>(a_vals.size()) != cfg.d * cfg.d) {
    throw ConfigError("config: A must list d*d entries");
  }
  cfg.A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      a_vals.data(), cfg.d, cfg.d);

  const auto b_vals = parse_bracket_list("B", require("B"));
  if (static_cast<int>(b_vals.size()) != cfg.d * cfg.m) {
    throw ConfigError("config: B must list d*m entries");
  }
  cfg.B = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      b_vals.data(), cfg.d, cfg.m);

  const auto x0_vals = parse_bracket_list("x0", require("x0"));
  if (static_cast<int>(x0_vals.size()) != cfg.d) {
    throw ConfigError("config: x0 must list d entries");
  }
  cfg.x0 = Eigen::Map<const Vector>(x0_vals.data(), cfg.d);

  if (auto it = kv.find("r"); it != kv.end()) {
    if (it->second == "auto") {
      cfg.r_auto = true;
    } else {
      cfg.r_auto = false;
      cfg.r = parse_double("r", it->second);
      if (!(cfg.r > 0.0)) throw ConfigError("config: r must be positive");
    }
  }
  if (auto it = kv.find("phi_target"); it != kv.end()) {
    cfg.phi_target = parse_double("phi_target", it->second);
  }
  if (auto it = kv.find("bins_file"); it != kv.end()) {
    cfg.bins_file = it->second;
  }
  if (cfg.bins_file.empty() && !cfg.phi_target) {
    throw ConfigError("config: need phi_target (or a bins_file)");
  }

  {
    std::string rest;
    const std::string kind = first_token(require("noise"), rest);
    cfg.noise.kind = kind;
    if (kind == "gaussian_isotropic" || kind == "uniform_ball") {
      cfg.noise.param = parse_double("noise", rest);
    } else if (kind == "gaussian_diag") {
      const auto vals = parse_bracket_list("noise", rest);
      if (static_cast<int>(vals.size()) != cfg.d) {
        throw ConfigError("config: gaussian_diag needs exactly d variances");
      }
      cfg.noise.variances = Eigen::Map<const Vector>(vals.data(), cfg.d);
    } else if (kind == "user_table") {
      if (rest.empty()) throw ConfigError("config: user_table needs a file path");
      cfg.noise.table_file = rest;
    } else {
      throw ConfigError("config: unknown noise kind '" + kind + "'");
    }
  }

  {
    const std::string& policy = require("policy");
    if (policy == "quantized") {
      cfg.policy = PolicyChoice::Quantized;
    } else if (policy == "baseline") {
      cfg.policy = PolicyChoice::Baseline;
    } else if (policy == "both") {
      cfg.policy = PolicyChoice::Both;
    } else {
      throw ConfigError("config: policy must be quantized, baseline, or both");
    }
  }

  cfg.runs = static_cast<int>(parse_int("runs", require("runs")));
  if (cfg.runs < 1) throw ConfigError("config: runs must be >= 1");
  cfg.horizon = static_cast<int>(parse_int("horizon", require("horizon")));
  if (cfg.horizon < 1) throw ConfigError("config: horizon must be >= 1");
  cfg.seed = parse_u64("seed", require("seed"));

  if (auto it = kv.find("umax"); it != kv.end()) {
    if (it->second == "auto") {
      cfg.umax_auto = true;
    } else {
      cfg.umax_auto = false;
      cfg.umax = parse_double("umax", it->second);
      if (!(cfg.umax > 0.0)) throw ConfigError("config: umax must be positive");
    }
  }

  static const char* known[] = {"d",     "m",          "A",         "B",    "x0",
                                "r",     "phi_target", "bins_file", "noise", "policy",
                                "runs",  "horizon",    "seed",      "umax"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) ok = true;
    }
    if (!ok) throw ConfigError("config: unknown key '" + key + "'");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  auto list = [](const auto& mat) {
    std::string s = "[";
    bool first = true;
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        if (!first) s += ' ';
        s += format_double(mat(i, j));
        first = false;
      }
    }
    s += ']';
    return s;
  };

  out += "d " + std::to_string(cfg.d) + "\n";
  out += "m " + std::to_string(cfg.m) + "\n";
  out += "A " + list(cfg.A) + "\n";
  out += "B " + list(cfg.B) + "\n";
  out += "x0 " + list(cfg.x0) + "\n";
  out += "r " + (cfg.r_auto ? std::string("auto") : format_double(cfg.r)) + "\n";
  if (cfg.phi_target) {
    out += "phi_target " + format_double(*cfg.phi_target) + "\n";
  }
  if (!cfg.bins_file.empty()) {
    out += "bins_file " + cfg.bins_file + "\n";
  }
  out += "noise " + cfg.noise.kind;
  if (cfg.noise.kind == "gaussian_isotropic" || cfg.noise.kind == "uniform_ball") {
    out += " " + format_double(cfg.noise.param);
  } else if (cfg.noise.kind == "gaussian_diag") {
    out += " " + list(cfg.noise.variances);
  } else if (cfg.noise.kind == "user_table") {
    out += " " + cfg.noise.table_file;
  }
  out += "\n";
  out += std::string("policy ") + to_string(cfg.policy) + "\n";
  out += "runs " + std::to_string(cfg.runs) + "\n";
  out += "horizon " + std::to_string(cfg.horizon) + "\n";
  out += "seed " + std::to_string(cfg.seed) + "\n";
  out += "umax " + (cfg.umax_auto ? std::string("auto") : format_double(cfg.umax)) + "\n";
  return out;
}

const char* to_string(PolicyChoice policy) {
  switch (policy) {
    case PolicyChoice::Quantized: return "quantized";
    case PolicyChoice::Baseline: return "baseline";
    case PolicyChoice::Both: return "both";
  }
  return "quantized";
}

namespace {

/// Directions + phi from the config (bins file wins over phi_target).
RadialQuantizer base_quantizer(const ExperimentConfig& cfg, double nominal_r) {
  if (!cfg.bins_file.empty()) {
    RadialQuantizer q = load_bins(cfg.bins_file);
    if (q.dim() != cfg.d) {
      throw ConfigError("config: bins file dimension does not match d");
    }
    return q;
  }
  return design_bins(cfg.d, nominal_r, *cfg.phi_target);
}

double resolve_c4(const NoiseModel& model, bool* analytic_used) {
  if (auto c4 = c4_analytic(model)) {
    if (analytic_used) *analytic_used = true;
    return *c4;
  }
  if (analytic_used) *analytic_used = false;
  SeededStream stream{kC4EstimateSeed, 0};
  return c4_empirical(model, kC4EstimateDraws, stream).value;
}

}  // namespace

ResolvedExperiment resolve(const ExperimentConfig& cfg) {
  LinearSystem sys(cfg.A, cfg.B);
  ReachabilityInfo reach = compute_reachability(sys);
  NoiseModel noise = make_noise_model(cfg.noise, cfg.d);
  bool analytic_used = false;
  const double c4 = resolve_c4(noise, &analytic_used);

  RadialQuantizer q = base_quantizer(cfg, cfg.r_auto ? 1.0 : cfg.r);
  double r = cfg.r;
  if (cfg.r_auto) {
    // A bins file carries its own radius; designed bins get the default
    // 10% margin above the theoretical minimum.
    r = cfg.bins_file.empty()
            ? kAutoRadiusFactor * min_radius(reach.kappa, reach.sigma_max_RI, c4, q.phi)
            : q.r;
  }
  q = with_radius(std::move(q), r);

  const double umax = cfg.umax_auto ? min_umax(r, reach.sigma_min) : cfg.umax;
  ConditionReport report = check_conditions(sys, reach, q, c4, umax);

  return ResolvedExperiment{std::move(sys),
                            std::move(reach),
                            std::move(q),
                            std::move(noise),
                            cfg.x0,
                            c4,
                            analytic_used,
                            umax,
                            cfg.policy,
                            cfg.runs,
                            cfg.horizon,
                            cfg.seed,
                            std::move(report)};
}

ConditionReport check_config(const ExperimentConfig& cfg) {
  try {
    return resolve(cfg).report;
  } catch (const NotReachableError&) {
    LinearSystem sys(cfg.A, cfg.B);
    NoiseModel noise = make_noise_model(cfg.noise, cfg.d);
    const double c4 = resolve_c4(noise, nullptr);
    RadialQuantizer q = base_quantizer(cfg, cfg.r_auto ? 1.0 : cfg.r);
    const double umax =
        cfg.umax_auto ? std::numeric_limits<double>::quiet_NaN() : cfg.umax;
    ConditionReport report = check_conditions(sys, q, c4, umax);
    if (cfg.r_auto && cfg.bins_file.empty()) {
      report.r = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
  }
}

}  // namespace qstab
