#pragma once

#include <iosfwd>

namespace dowg {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int validation = 3;
inline constexpr int solver = 4;
inline constexpr int io = 5;
inline constexpr int selftest_failed = 6;
}  // namespace exit_code

/// Full command-line run: parse, execute, emit files, print a summary.
/// Returns one of the exit codes above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dowg
