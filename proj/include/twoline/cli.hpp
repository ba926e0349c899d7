#pragma once

// Command-line front end. Exit codes: 0 success, 1 negative mathematical
// answer (with a full report), 2 input error, 3 numerically undecided or
// infeasible glue.

#include <iosfwd>
#include <string>
#include <vector>

namespace twoline::cli {

inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;
inline constexpr int kInputError = 2;
inline constexpr int kIndeterminate = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace twoline::cli
