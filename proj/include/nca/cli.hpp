#pragma once

#include <string>
#include <vector>

namespace nca::cli {

// Exit codes: 0 success, 1 validation/parse failure, 2 no design found
// (rejected or exhausted), 64 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNoDesign = 2;
inline constexpr int kExitUsage = 64;

/// Run the command line given the arguments after the program name.
int run(const std::vector<std::string>& args);

}  // namespace nca::cli
