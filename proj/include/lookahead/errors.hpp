#pragma once

#include <stdexcept>
#include <string>

namespace lookahead {

/// Array shapes disagree with the declared (S, A, H).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter lies outside the domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input fails a feasibility check (e.g. flow conservation).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation would exceed a configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lookahead
