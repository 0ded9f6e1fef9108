#include "qstab/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qstab/rng.hpp"

namespace qstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDesignDirectionBudget = 8192;
constexpr std::uint64_t kSphereSampleSeed = 0x51B7A93C2E6D4F01ull;

void append_formatted(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

/// Deterministic point cloud on the unit sphere: Fibonacci lattice for d = 3,
/// seeded normalized Gaussians otherwise.
std::vector<Vector> sphere_samples(int d, int n) {
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(n));
  if (d == 3) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double theta = 2.0 * kPi * std::fmod(i / golden, 1.0);
      Vector p(3);
      p << rho * std::cos(theta), rho * std::sin(theta), z;
      pts.push_back(std::move(p));
    }
    return pts;
  }
  SplitMix64 gen(kSphereSampleSeed ^ static_cast<std::uint64_t>(d));
  while (static_cast<int>(pts.size()) < n) {
    Vector p(d);
    for (int i = 0; i < d; i += 2) {
      const double u1 = gen.next_unit_positive();
      const double u2 = gen.next_unit();
      const double mag = std::sqrt(-2.0 * std::log(u1));
      p(i) = mag * std::cos(2.0 * kPi * u2);
      if (i + 1 < d) p(i + 1) = mag * std::sin(2.0 * kPi * u2);
    }
    const double norm = p.norm();
    if (norm > 1e-12) pts.push_back(p / norm);
  }
  return pts;
}

double clamped_acos(double dot) { return std::acos(std::clamp(dot, -1.0, 1.0)); }

/// Max over sample points of the min angle to any direction.
double sampled_covering_angle(const std::vector<Vector>& directions, int d, int samples) {
  double worst = 0.0;
  for (const Vector& p : sphere_samples(d, samples)) {
    double best_dot = -1.0;
    for (const Vector& u : directions) {
      best_dot = std::max(best_dot, u.dot(p));
    }
    worst = std::max(worst, clamped_acos(best_dot));
  }
  return worst;
}

double covering_angle_of(const std::vector<Vector>& directions, int samples) {
  const int d = static_cast<int>(directions.front().size());
  if (d == 1) {
    bool pos = false;
    bool neg = false;
    for (const Vector& u : directions) (u(0) > 0 ? pos : neg) = true;
    return (pos && neg) ? 0.0 : kPi;
  }
  if (d == 2) {
    std::vector<double> angles;
    angles.reserve(directions.size());
    for (const Vector& u : directions) angles.push_back(std::atan2(u(1), u(0)));
    std::sort(angles.begin(), angles.end());
    double max_gap = angles.front() + 2.0 * kPi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) {
      max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
    }
    return max_gap / 2.0;
  }
  return sampled_covering_angle(directions, d, samples);
}

void validate_directions(const std::vector<Vector>& directions) {
  if (directions.empty()) {
    throw std::invalid_argument("quantizer: at least one direction required");
  }
  const Eigen::Index d = directions.front().size();
  if (d < 1) {
    throw std::invalid_argument("quantizer: directions must be nonempty vectors");
  }
  for (const Vector& u : directions) {
    if (u.size() != d) {
      throw std::invalid_argument("quantizer: directions must share one dimension");
    }
    if (!u.allFinite() || std::abs(u.norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("quantizer: directions must be unit vectors (within 1e-12)");
    }
  }
  for (std::size_t i = 0; i < directions.size(); ++i) {
    for (std::size_t j = i + 1; j < directions.size(); ++j) {
      // Chordal distance resolves angles far below what acos of a dot can.
      if ((directions[i] - directions[j]).norm() <= 1e-9) {
        throw std::invalid_argument("quantizer: directions must be pairwise distinct");
      }
    }
  }
}

}  // namespace

RadialQuantizer make_radial_quantizer(double r, std::vector<Vector> directions, int samples) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("quantizer: r must be positive and finite");
  }
  validate_directions(directions);
  RadialQuantizer q;
  q.r = r;
  q.interior_bin = Vector::Zero(directions.front().size());
  q.phi = covering_angle_of(directions, samples);
  q.certified = directions.front().size() <= 2;
  q.directions = std::move(directions);
  return q;
}

RadialQuantizer design_bins(int d, double r, double phi_target) {
  if (d < 1) {
    throw std::invalid_argument("design_bins: d must be >= 1");
  }
  if (!(phi_target > 0.0) || !(phi_target < kPi / 4.0)) {
    throw std::invalid_argument("design_bins: phi_target must lie in (0, pi/4)");
  }

  std::vector<Vector> directions;
  double phi = 0.0;
  bool certified = true;

  if (d == 1) {
    directions = {Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
    phi = 0.0;
  } else if (d == 2) {
    // N equally spaced bins give exactly pi/N; the epsilon absorbs rounding
    // when phi_target is itself pi/N.
    const int n = static_cast<int>(std::ceil(kPi / phi_target - 1e-9));
    directions.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double theta = 2.0 * kPi * k / n;
      Vector u(2);
      u << std::cos(theta), std::sin(theta);
      directions.push_back(std::move(u));
    }
    phi = kPi / n;
  } else {
    const int samples = std::min(400000, 100000 + 50000 * (d - 3));
    const double margin = 0.05 * phi_target;
    const std::vector<Vector> cloud = sphere_samples(d, samples);

    directions.push_back(cloud.front());
    std::vector<double> best_dot(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      best_dot[i] = directions.front().dot(cloud[i]);
    }
    while (true) {
      std::size_t farthest = 0;
      double min_dot = 2.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (best_dot[i] < min_dot) {
          min_dot = best_dot[i];
          farthest = i;
        }
      }
      phi = clamped_acos(min_dot);
      if (phi <= phi_target - margin) break;
      if (static_cast<int>(directions.size()) >= kDesignDirectionBudget) {
        throw DesignFailure("design_bins: could not reach covering angle " +
                            std::to_string(phi_target) + " within " +
                            std::to_string(kDesignDirectionBudget) + " directions");
      }
      const Vector& added = cloud[farthest];
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        best_dot[i] = std::max(best_dot[i], added.dot(cloud[i]));
      }
      directions.push_back(added);
    }
    certified = false;
  }

  RadialQuantizer q = make_radial_quantizer(r, std::move(directions));
  q.phi = phi;
  q.certified = certified;
  return q;
}

double covering_angle(const RadialQuantizer& q, int samples) {
  if (q.directions.empty()) {
    throw std::invalid_argument("covering_angle: quantizer has no directions");
  }
  if (samples < 1) {
    throw std::invalid_argument("covering_angle: samples must be >= 1");
  }
  return covering_angle_of(q.directions, samples);
}

Vector quantize(const RadialQuantizer& q, const Vector& z) {
  if (z.size() != q.dim()) {
    throw std::invalid_argument("quantize: dimension mismatch");
  }
  if (!z.allFinite()) {
    throw std::invalid_argument("quantize: z must be finite");
  }
  const double norm = z.norm();
  if (norm < q.r) {
    return q.interior_bin;
  }
  const Vector unit = z / norm;
  std::size_t best = 0;
  double best_dot = unit.dot(q.directions[0]);
  for (std::size_t i = 1; i < q.directions.size(); ++i) {
    const double dot = unit.dot(q.directions[i]);
    if (dot > best_dot + kQuantizeTieTolerance) {
      best_dot = dot;
      best = i;
    }
  }
  return q.r * q.directions[best];
}

Vector sat(double r, const Vector& y) {
  if (!(r > 0.0)) {
    throw std::invalid_argument("sat: r must be positive");
  }
  if (!y.allFinite()) {
    throw std::invalid_argument("sat: y must be finite");
  }
  const double norm = y.norm();
  if (norm == 0.0) {
    return Vector::Zero(y.size());
  }
  return (std::min(r, norm) / norm) * y;
}

Projection project(const Vector& v, const Vector& x) {
  if (v.size() != x.size()) {
    throw std::invalid_argument("project: dimension mismatch");
  }
  const double norm = v.norm();
  if (norm == 0.0) {
    throw std::invalid_argument("project: v must be nonzero");
  }
  const Vector unit = v / norm;
  Projection p;
  p.parallel = unit.dot(x) * unit;
  p.orthogonal = x - p.parallel;
  return p;
}

RadialQuantizer with_radius(RadialQuantizer q, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("with_radius: r must be positive and finite");
  }
  q.r = r;
  q.interior_bin = Vector::Zero(q.dim());
  return q;
}

void save_bins(const RadialQuantizer& q, std::ostream& out) {
  std::string line;
  line += std::to_string(q.dim());
  line += ' ';
  append_formatted(line, q.r);
  line += '\n';
  out << line;
  for (const Vector& u : q.directions) {
    line.clear();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (i > 0) line += ' ';
      append_formatted(line, u(i));
    }
    line += '\n';
    out << line;
  }
}

void save_bins(const RadialQuantizer& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("save_bins: cannot open " + path);
  }
  save_bins(q, out);
}

RadialQuantizer load_bins(std::istream& in, int samples) {
  int d = 0;
  double r = 0.0;
  if (!(in >> d >> r)) {
    throw ConfigError("load_bins: expected header line 'd r'");
  }
  if (d < 1) {
    throw ConfigError("load_bins: dimension must be >= 1");
  }
  std::vector<Vector> directions;
  while (true) {
    Vector u(d);
    if (!(in >> u(0))) break;
    for (int i = 1; i < d; ++i) {
      if (!(in >> u(i))) {
        throw ConfigError("load_bins: truncated direction row");
      }
    }
    directions.push_back(std::move(u));
  }
  try {
    return make_radial_quantizer(r, std::move(directions), samples);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("load_bins: ") + e.what());
  }
}

RadialQuantizer load_bins(const std::string& path, int samples) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("load_bins: cannot open " + path);
  }
  return load_bins(in, samples);
}

}  // namespace qstab
