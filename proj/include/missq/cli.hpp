#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace missq::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kIngest = 3,
    kFeasibility = 4,
    kIo = 5,
};

/// Runs one invocation. `args` excludes the program name. Tabular results go
/// to `out` unless -o is given; diagnostics and usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace missq::cli
