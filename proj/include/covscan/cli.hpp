#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covscan::cli {

enum ExitCode : int { kOk = 0, kVerificationFailure = 1, kConfigError = 2 };

/// Runs the command line `args` (program name excluded). Subcommands:
/// scan, sample, fd-verify, bvp-demo, list-problems.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace covscan::cli
