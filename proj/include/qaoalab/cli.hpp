#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qaoalab::cli {

inline constexpr const char* kToolName = "qaoalab";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kNumericalFailure = 2,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qaoalab::cli
