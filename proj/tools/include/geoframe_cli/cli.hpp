#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geoframe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitIo = 4;

/// Runs one `geoframe` invocation. `args` excludes the program name. Output
/// files named "-" go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoframe::cli
