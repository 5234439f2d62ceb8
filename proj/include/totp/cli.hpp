#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace totp::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 2;
inline constexpr int kInternalError = 3;

/// Runs the command line (args excludes the program name). Results go to
/// `out` as JSON, human-readable summaries and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace totp::cli
