#include "qstab/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qstab {

namespace {

/// Generator for one draw: splitmix64 advanced to the stream position keyed
/// by (seed, counter), then iterated within the draw.
SplitMix64 draw_rng(const SeededStream& stream) {
  return SplitMix64(mix64(stream.seed + kGoldenGamma * (stream.counter + 1)));
}

/// Box-Muller pair fill: standard normals into w.
void fill_standard_normal(SplitMix64& gen, Vector& w) {
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index i = 0; i < w.size(); i += 2) {
    const double u1 = gen.next_unit_positive();
    const double u2 = gen.next_unit();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    w(i) = mag * std::cos(two_pi * u2);
    if (i + 1 < w.size()) w(i + 1) = mag * std::sin(two_pi * u2);
  }
}

}  // namespace

NoiseModel NoiseModel::gaussian_isotropic(int d, double sigma) {
  if (d < 1) throw std::invalid_argument("noise: dimension must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("noise: sigma must be finite and >= 0");
  }
  NoiseModel m;
  m.kind_ = Kind::GaussianIsotropic;
  m.d_ = d;
  m.sigma_ = sigma;
  return m;
}

NoiseModel NoiseModel::gaussian_diag(Vector variances) {
  if (variances.size() < 1) throw std::invalid_argument("noise: dimension must be >= 1");
  if (!variances.allFinite() || (variances.array() < 0.0).any()) {
    throw std::invalid_argument("noise: variances must be finite and >= 0");
  }
  NoiseModel m;
  m.kind_ = Kind::GaussianDiag;
  m.d_ = static_cast<int>(variances.size());
  m.variances_ = std::move(variances);
  return m;
}

NoiseModel NoiseModel::uniform_ball(int d, double radius) {
  if (d < 1) throw std::invalid_argument("noise: dimension must be >= 1");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("noise: radius must be finite and >= 0");
  }
  NoiseModel m;
  m.kind_ = Kind::UniformBall;
  m.d_ = d;
  m.radius_ = radius;
  return m;
}

NoiseModel NoiseModel::user_table(std::vector<Vector> samples) {
  if (samples.empty()) throw std::invalid_argument("noise: user table must be nonempty");
  const Eigen::Index d = samples.front().size();
  if (d < 1) throw std::invalid_argument("noise: user table vectors must be nonempty");
  for (const Vector& s : samples) {
    if (s.size() != d || !s.allFinite()) {
      throw std::invalid_argument("noise: user table rows must be finite and share one dimension");
    }
  }
  NoiseModel m;
  m.kind_ = Kind::UserTable;
  m.d_ = static_cast<int>(d);
  m.table_ = std::move(samples);
  return m;
}

Vector sample(const NoiseModel& model, SeededStream& stream) {
  SplitMix64 gen = draw_rng(stream);
  ++stream.counter;
  Vector w(model.dim());
  switch (model.kind()) {
    case NoiseModel::Kind::GaussianIsotropic:
      fill_standard_normal(gen, w);
      w *= model.sigma();
      return w;
    case NoiseModel::Kind::GaussianDiag:
      fill_standard_normal(gen, w);
      return w.cwiseProduct(model.variances().cwiseSqrt());
    case NoiseModel::Kind::UniformBall: {
      if (model.radius() == 0.0) return Vector::Zero(model.dim());
      double norm = 0.0;
      do {
        fill_standard_normal(gen, w);
        norm = w.norm();
      } while (norm <= 1e-300);
      const double u = gen.next_unit_positive();
      return (model.radius() * std::pow(u, 1.0 / model.dim()) / norm) * w;
    }
    case NoiseModel::Kind::UserTable: {
      const std::size_t idx = gen.next_u64() % model.table().size();
      return model.table()[idx];
    }
  }
  throw std::logic_error("noise: unknown kind");
}

std::optional<double> c4_analytic(const NoiseModel& model) {
  const double d = model.dim();
  switch (model.kind()) {
    case NoiseModel::Kind::GaussianIsotropic: {
      // ||w||^2 / sigma^2 is chi-square with d dof: E(chi2_d)^2 = d(d+2).
      const double s2 = model.sigma() * model.sigma();
      return s2 * s2 * d * (d + 2.0);
    }
    case NoiseModel::Kind::GaussianDiag: {
      // E||w||^4 = Var(||w||^2) + (E||w||^2)^2 with independent coordinates.
      const double sum = model.variances().sum();
      const double sum_sq = model.variances().squaredNorm();
      return sum * sum + 2.0 * sum_sq;
    }
    case NoiseModel::Kind::UniformBall: {
      const double r4 = std::pow(model.radius(), 4);
      return r4 * d / (d + 4.0);
    }
    case NoiseModel::Kind::UserTable:
      return std::nullopt;
  }
  return std::nullopt;
}

C4Estimate c4_empirical(const NoiseModel& model, std::int64_t n, SeededStream& stream) {
  if (n < 1000) {
    throw std::invalid_argument("c4_empirical: need at least 1000 draws");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double q = sample(model, stream).squaredNorm();
    const double fourth = q * q;
    sum += fourth;
    sum_sq += fourth * fourth;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace qstab
