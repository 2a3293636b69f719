#pragma once

#include <stdexcept>
#include <string>

namespace umatch {

/// A numeric argument is outside its admissible range (probabilities,
/// counts, quadrant weights).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a precondition on structured input (node id out of range,
/// non-injective link set).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file content. The message names the file and line.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace umatch
