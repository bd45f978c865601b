#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace divstats::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,  ///< validate: some counted threshold missed its tolerance
    kInvalidInput = 2,
    kRuntimeError = 3,
    kInsufficientData = 4,
};

/// Runs the command line `args` (args[0] is the program name), writing
/// results to `out` and messages to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace divstats::cli
