#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctdta::cli {

enum ExitCode : int {
    ok = 0,
    usage_error = 1,
    validation_error = 2,
    not_converged = 3,
};

// Runs the command-line driver; the report goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctdta::cli
