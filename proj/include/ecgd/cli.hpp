#pragma once

#include <string>
#include <vector>

namespace ecgd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSampleFailed = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kToolVersion = "0.3.0";

/// Entry point shared by the `ecgd` binary and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args);

}  // namespace ecgd::cli
