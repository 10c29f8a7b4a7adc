#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rabi::cli {

enum ExitCode : int {
  kOk = 0,
  kBadArguments = 1,
  kNotConverged = 2,
  kIoFailure = 3,
};

/// Runs one subcommand (spectrum, exceptional, curves, oracle). `args`
/// excludes the program name. Results go to --output, or to `out` when no
/// output path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rabi::cli
