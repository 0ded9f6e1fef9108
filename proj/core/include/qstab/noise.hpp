#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qstab/linalg.hpp"
#include "qstab/rng.hpp"

namespace qstab {

/// Counter-based stream position: the draw at (seed, counter) is a pure
/// function of both, so streams can be replayed and split freely.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t counter = 0;
};

/// Substream for an ensemble member: seed XOR run-index through mix64.
inline SeededStream substream(std::uint64_t seed, std::uint64_t index) {
  return SeededStream{mix64(seed ^ index), 0};
}

/// Mean-zero noise model for w_t. Gaussian kinds and the uniform ball carry
/// an analytic fourth moment; a user table does not.
class NoiseModel {
public:
  enum class Kind { GaussianIsotropic, GaussianDiag, UniformBall, UserTable };

  static NoiseModel gaussian_isotropic(int d, double sigma);
  static NoiseModel gaussian_diag(Vector variances);
  static NoiseModel uniform_ball(int d, double radius);
  static NoiseModel user_table(std::vector<Vector> samples);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  double sigma() const { return sigma_; }
  double radius() const { return radius_; }
  const Vector& variances() const { return variances_; }
  const std::vector<Vector>& table() const { return table_; }

private:
  NoiseModel() = default;

  Kind kind_ = Kind::GaussianIsotropic;
  int d_ = 0;
  double sigma_ = 0.0;
  double radius_ = 0.0;
  Vector variances_;
  std::vector<Vector> table_;
};

/// One draw at the stream's current counter; advances the counter. Draws at
/// distinct counters are mutually independent.
Vector sample(const NoiseModel& model, SeededStream& stream);

/// sup_t E||w_t||^4 in closed form, when the model admits one.
std::optional<double> c4_analytic(const NoiseModel& model);

struct C4Estimate {
  double value;
  double standard_error;
};

/// Monte Carlo estimate of E||w||^4 over n fresh draws (n >= 1000).
C4Estimate c4_empirical(const NoiseModel& model, std::int64_t n, SeededStream& stream);

}  // namespace qstab
