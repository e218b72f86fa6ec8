#pragma once

#include <stdexcept>
#include <string>

namespace sikam {

// Invalid parameters, mismatched dimensions, out-of-range values.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// Reading or writing files failed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// The request is well-formed but cannot be satisfied, e.g. the candidate
// pool is smaller than the number of neighbours asked for.
class InfeasibleConfig : public std::runtime_error {
 public:
  explicit InfeasibleConfig(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sikam
