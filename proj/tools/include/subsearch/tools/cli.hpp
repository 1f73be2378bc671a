#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subsearch::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `subsearch` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on usage errors and 2 on data errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

/// Parses a comma-separated list of numbers ("0,10,25,50").
std::vector<double> parse_number_list(const std::string& text);

}  // namespace subsearch::tools
