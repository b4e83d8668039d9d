// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptscan {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown preset, missing file, missing column.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by the caller (bad sizes, bad parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested feature is outside the supported envelope.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Configured size or memory cap exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (non-convergence, singular pivot). Carries the index
/// of the offending eigenvalue / pivot when there is one.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index_(index) {}

  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// Bisection bracket whose endpoints classify identically.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Curve fit failed from every start point.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace ptscan
