#pragma once

#include <stdexcept>
#include <string>

namespace posrep {

/// Numerical failure: quadrature non-convergence, divergent series,
/// singular Hankel systems, broken positivity.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A construction step refused to proceed because a mathematical
/// precondition (dominance, certificate) does not hold for the inputs.
class CheckError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace posrep
