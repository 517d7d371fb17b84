#pragma once

#include <stdexcept>
#include <string>

namespace grenzero {

/// Invalid input to a library operation (domain violation, bad config).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric procedure hit its iteration or horizon cap before its
/// stopping criterion was met.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ArgumentError(message);
}

}  // namespace detail
}  // namespace grenzero
