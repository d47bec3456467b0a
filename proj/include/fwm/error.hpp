#pragma once

#include <stdexcept>
#include <string>

namespace fwm {

/// Bad user-supplied configuration (cutoffs, grids, unknown names).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Witness id outside the implemented set, or an invalid (m, n) order.
class InvalidWitness : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moment request beyond the configured maximum order.
class InvalidMomentSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Truncated basis cannot hold the requested coherent state.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time stepping did not reach the requested tolerance within budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fwm
