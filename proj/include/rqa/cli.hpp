#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command. argv[0] is the program name. Errors are reported as a
/// single "error: ..." line on `err`; the return value is the exit code.
int run(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rqa::cli
