#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage or configuration
// error, 2 numerical non-convergence, 3 invariant violation.

#include <ostream>
#include <string>
#include <vector>

namespace qfric {

enum ExitCode
{
    exit_ok = 0,
    exit_usage = 1,
    exit_convergence = 2,
    exit_invariant = 3,
};

/// Runs one command. `args` excludes the program name. CSV goes to `out`
/// unless --out is given; diagnostics go to `log`.
int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& log);

}  // namespace qfric
