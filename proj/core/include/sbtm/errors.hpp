#pragma once

#include <stdexcept>
#include <string>

namespace sbtm {

/// Malformed or semantically invalid input data (files, edge lists, ids).
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument values (nonpositive widths, out-of-range labels, bad hyperparameters).
struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Allocation matrix disagrees with the activity pattern, or a move would
/// touch the reserved inactive label.
struct ConsistencyError : std::runtime_error {
  explicit ConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sbtm
