#pragma once

#include <stdexcept>
#include <string>

namespace densplit {

/// A caller violated an operation's precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Explicit materialization was requested beyond the configured cap; the caller
/// has to switch to an interval-symbolic descriptor.
class HorizonOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A descriptor or serialized document could not be parsed.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A randomized or truncated construction did not reach its target; the
/// message carries the failing diagnostics.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace densplit
