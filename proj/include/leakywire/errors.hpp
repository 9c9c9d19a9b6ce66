#pragma once

#include <stdexcept>
#include <string>

namespace leakywire {

// Input outside the domain of an operation (s outside [0, L], point on the curve, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent configuration (basis incompatible with domain, malformed config, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: eigensolver breakdown, singular Gram matrix, ill-conditioned fit.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace leakywire
