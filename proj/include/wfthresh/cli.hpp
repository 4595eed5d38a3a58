#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wfthresh {

inline constexpr int kExitDone = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInconclusive = 2;

/// The wfthresh command line. argv[0] is the program name. JSON results go
/// to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace wfthresh
