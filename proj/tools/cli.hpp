// Copyright 2026 The ptscan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace ptscan::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNumeric = 3,
};

/// Runs the `ptscan` command line. Output goes to `out`, diagnostics to
/// `err`; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ptscan::cli
