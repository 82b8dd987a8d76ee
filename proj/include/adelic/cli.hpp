#pragma once

#include <ostream>

namespace adelic {

// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_verification_failed = 1,
    exit_usage = 2,
    exit_precision = 3,
};

// Parses argv and runs one subcommand. Tables go to `out` (or the --out
// file, in which case the JSON summary goes to `out`); diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adelic
