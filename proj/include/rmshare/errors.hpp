// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rmshare {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: config syntax, missing keys, invariant violations in loaded data.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Argument shapes or values outside an operation's precondition.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Requested rate (or subproblem) has no feasible point.
class InfeasibleError : public Error {
public:
  using Error::Error;
};

/// Iterative routine failed to converge or hit a non-finite value.
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace rmshare
