#pragma once

#include <iosfwd>

namespace bankflow {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,       // parse or semantic error in an input file
  kExitNumeric = 3,     // negativity, singularity or non-finite value
  kExitValidation = 4,  // stochastic check disagreed with the ODE
};

/// Runs one command line. Results go to `out` (or the --out file) only on
/// success; every failure prints exactly one line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bankflow
