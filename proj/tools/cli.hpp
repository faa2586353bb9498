#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace foamlab::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kSamplingBudget = 3,
    kResourceLimit = 4,
};

/// Runs one command line (args[0] is the program name). Results go to `out`
/// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits.
std::string fmt(double v);

} // namespace foamlab::cli
