#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace statmech::cli {

inline constexpr int kExitConfig = 2;
inline constexpr int kExitCompute = 3;

const char* version();

/// Runs one invocation. `args` excludes the program name. Results go to `out`
/// unless --out names a file; errors are written to `err` as one JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace statmech::cli
