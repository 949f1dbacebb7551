// Copyright 2026 The interp-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INTERP_CLI_HPP
#define INTERP_CLI_HPP

#include <iosfwd>

namespace interp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonConvergence = 3;

/// Parses argv, runs one subcommand and writes its report to the configured output.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace interp

#endif  // INTERP_CLI_HPP
