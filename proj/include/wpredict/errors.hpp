#pragma once

#include <stdexcept>
#include <string>

namespace wpredict {

/// Precondition or input-domain violation (bad dimension, non-SPD input, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature ran out of subdivision budget. Carries the best
/// estimate reached and the accompanying error bound.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const { return best_estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// Problem size exceeds a configured cap (e.g. assignment solver cloud size).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario file or CLI argument failed schema validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monte Carlo run aborted (e.g. too many per-replicate estimator failures).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wpredict
