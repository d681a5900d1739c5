#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace indefspec::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidationFailure = 1,
    kExitUsage = 2,
    kExitSolver = 3,
};

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits ("%.17g").
std::string format_double(double v);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

}  // namespace indefspec::cli
