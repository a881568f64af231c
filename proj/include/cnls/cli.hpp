#pragma once

// The `cnls` command line: ground | pair | sweep | continue | verify | energy-report.
//
// Exit codes: 0 success, 1 usage / parse / invalid input, 2 solver failure, 3 verify check
// failure, 4 output could not be written.

#include <iosfwd>

namespace cnls {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitCheck = 3;
inline constexpr int kExitIo = 4;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cnls
