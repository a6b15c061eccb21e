#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace divnorm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitInvalidMath = 3;
inline constexpr int kExitIo = 4;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace divnorm::cli
