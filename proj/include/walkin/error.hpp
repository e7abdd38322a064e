// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace walkin {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate input geometry (zero vectors, collinear points, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Malformed document or file. Carries the 1-based line number when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> line_;
};

/// Motion script that cannot drive the synthetic generator.
class ScriptError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the walk-in calibration flow.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

class RoleAmbiguityError : public CalibrationError {
 public:
  using CalibrationError::CalibrationError;
};

class PostureError : public CalibrationError {
 public:
  using CalibrationError::CalibrationError;
};

class MisalignmentError : public CalibrationError {
 public:
  using CalibrationError::CalibrationError;
};

}  // namespace walkin
