#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qstab {

/// The pair (A, B) does not reach full rank within the scanned horizon.
class NotReachableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A matrix is row-rank deficient where full row rank is required.
class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative numeric routine failed to converge or produced an
/// inconsistent result.
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Quantizer construction could not certify the requested covering angle
/// within its iteration budget.
class DesignFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A simulated state crossed the divergence guard. Carries the time index of
/// the offending state and, inside ensembles, the run index (-1 otherwise).
class DivergedError : public std::runtime_error {
public:
  DivergedError(const std::string& what, std::int64_t time_index,
                std::int64_t run_index = -1)
      : std::runtime_error(what), time_index(time_index), run_index(run_index) {}

  std::int64_t time_index;
  std::int64_t run_index;
};

/// Malformed experiment configuration or bins file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qstab
