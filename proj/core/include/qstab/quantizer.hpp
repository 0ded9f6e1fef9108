#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qstab/linalg.hpp"

namespace qstab {

/// Dot products within this of the best are treated as ties (resolved toward
/// the lowest direction index).
inline constexpr double kQuantizeTieTolerance = 1e-12;

/// Default sample budget for sampled covering-angle estimates (d >= 3).
inline constexpr int kDefaultCoveringSamples = 100000;

/// Finite radial quantizer: one designated bin for the interior of the open
/// r-ball plus r * u for each unit direction u. phi is the covering angle of
/// the direction set: exact for d <= 2, a sampled lower bound otherwise.
struct RadialQuantizer {
  double r;
  std::vector<Vector> directions;
  Vector interior_bin;
  double phi;
  bool certified;

  Eigen::Index dim() const { return directions.empty() ? 0 : directions.front().size(); }
  int bin_count() const { return static_cast<int>(directions.size()) + 1; }
};

/// Validates directions (unit norm within 1e-12, pairwise distinct) and
/// computes phi. The interior bin defaults to the origin. Direction sets with
/// phi >= pi/4 are representable; admissibility is judged by the policy
/// condition checks, not here.
RadialQuantizer make_radial_quantizer(double r, std::vector<Vector> directions,
                                      int samples = kDefaultCoveringSamples);

/// Builds a quantizer with covering angle at most phi_target (exactly
/// certified for d <= 2, sampled for d >= 3 via greedy farthest-point
/// insertion). Throws std::invalid_argument for phi_target outside (0, pi/4)
/// and DesignFailure when the greedy construction exhausts its budget.
RadialQuantizer design_bins(int d, double r, double phi_target);

/// Covering angle of the direction set: half the largest angular gap for
/// d = 2 (exact), max-min angle over sampled sphere points for d >= 3
/// (a lower bound on the true covering angle).
double covering_angle(const RadialQuantizer& q, int samples = kDefaultCoveringSamples);

/// Interior bin for ||z|| < r, else the nearest-by-angle bin r * u on the
/// sphere. Depends on z only through z / ||z|| outside the ball.
Vector quantize(const RadialQuantizer& q, const Vector& z);

/// Radial r-saturation: min{r, ||y||} y / ||y||, with sat_r(0) = 0.
Vector sat(double r, const Vector& y);

struct Projection {
  Vector parallel;
  Vector orthogonal;
};

/// Orthogonal decomposition of x along span(v). Throws for v = 0.
Projection project(const Vector& v, const Vector& x);

/// Replaces the saturation radius, keeping directions and phi.
RadialQuantizer with_radius(RadialQuantizer q, double r);

/// Text export: first line "d r", then one unit direction per line with 17
/// significant digits.
void save_bins(const RadialQuantizer& q, std::ostream& out);
void save_bins(const RadialQuantizer& q, const std::string& path);
RadialQuantizer load_bins(std::istream& in, int samples = kDefaultCoveringSamples);
RadialQuantizer load_bins(const std::string& path, int samples = kDefaultCoveringSamples);

}  // namespace qstab
