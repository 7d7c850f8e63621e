#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lipfuse::cli {

/// Process exit statuses.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,      // bad flags or parameters
  kData = 2,       // invalid or unreadable input data, unwritable output
  kNumerical = 3,  // e.g. SMO did not converge
};

/// Environment variable consulted for the output directory when --out is
/// not given.
inline constexpr const char* kOutputDirEnv = "LIPFUSE_OUTPUT_DIR";

/// Runs the command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lipfuse::cli
