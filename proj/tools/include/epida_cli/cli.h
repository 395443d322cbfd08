#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace epida::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// args excludes the program name. Results go to `out`, diagnostics and
// throughput lines to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads a flat key=value file into "--key=value" arguments. Blank lines and
// lines starting with '#' are ignored. Throws epida::ParseError on a line
// without '='.
std::vector<std::string> config_arguments(const std::string& path);

}  // namespace epida::cli
