#pragma once

#include <stdexcept>
#include <string>

namespace rdde {

/// Grid spacings or windows that are not commensurate (delay not a multiple
/// of the step, window length not a multiple of the step, mismatched bases).
struct GridMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A shift or slice request leaves the sampled window. The caller must
/// sample a larger window up front; paths are never re-simulated.
struct OutOfWindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation meant for plain controlled paths received a delayed one,
/// or vice versa.
struct WrongKindError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (exponent triple, unknown keys, bad parameters).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The solution left the blow-up guard region.
struct DivergenceError : std::runtime_error {
  int node;
  DivergenceError(const std::string& msg, int node_) : std::runtime_error(msg), node(node_) {}
};

}  // namespace rdde
