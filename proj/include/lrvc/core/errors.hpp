// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace lrvc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor dimensions or sequence lengths that violate an operation's contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range or unsupported argument value.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file content (WAV, RVF1, RVCK, config).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint does not match the model it is being loaded into.
class IncompatibleError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values encountered during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Corpus item that cannot be used (too short, missing view).
class DataError : public Error {
 public:
  using Error::Error;
};

/// I/O failure, always carrying the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lrvc
