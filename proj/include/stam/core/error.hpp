// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace stam {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tensor dimension disagreement (names both shapes in the message).
struct ShapeError : Error {
  using Error::Error;
};

/// Violated API precondition (non-scalar backward root, bad argument).
struct ContractError : Error {
  using Error::Error;
};

/// Invalid experiment / model / training configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed or inconsistent input data (CSV cells, schemas, splits).
struct DataError : Error {
  using Error::Error;
};

/// File I/O failure, unreadable or corrupt artifact.
struct IoError : Error {
  using Error::Error;
};

/// Training or inference produced non-finite values.
struct DivergedError : Error {
  DivergedError(const std::string& msg, int epoch_or_step)
      : Error(msg), where(epoch_or_step) {}
  int where = -1;
};

}  // namespace stam
