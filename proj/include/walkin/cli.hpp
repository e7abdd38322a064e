// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: gen, calibrate, solve, compare.

#pragma once

#include <iosfwd>

namespace walkin::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kCalibration = 4,
};

/// Runs the `walkin` command line. Never throws; errors become exit codes
/// with a message on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace walkin::cli
