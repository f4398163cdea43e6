#pragma once

#include <stdexcept>
#include <string>

namespace unmask {

// Thrown when an exact computation would exceed its enumeration budget
// (e.g. joint tables beyond the supported state-space size). The CLI maps
// this to exit code 3.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// A broken internal invariant (never expected under valid inputs). Exit code 4.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

// A marginal predictor returned an invalid distribution. Carries the
// offending cell. Exit code 4.
class PredictorContractError : public std::runtime_error {
 public:
  PredictorContractError(const std::string& what, int row, int col)
      : std::runtime_error(what), row(row), col(col) {}

  int row;
  int col;
};

}  // namespace unmask
