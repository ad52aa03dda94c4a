#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace hyperctl {

/// Compact "%.6g" rendering for error messages.
inline std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state left the physical domain of the flux (e.g. non-positive density).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalues of Df are complex or coincide.
class HyperbolicityError : public Error {
 public:
  using Error::Error;
};

/// A Newton-type solve did not converge, or its input exceeded the solvable radius.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A caller-side contract was broken (wrong wave families at a boundary, bad arguments).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition does not hold for the given data.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A run-time invariant check failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperctl
