#pragma once

#include <stdexcept>
#include <string>

namespace kc {

// Solver breakdown, singular operators, ambiguous kernels, Newton failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structures the count rules do not cover, e.g. defective points with geom_mult > 1.
class UnsupportedStructure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A computed quantity contradicts a theorem that must hold. Treated as a test failure.
class TheoremViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kc
