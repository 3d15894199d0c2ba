#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace segblend::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // a library error; see the error line
inline constexpr int kUsage = 2;    // bad flags

// Runs the segblend command line. Errors are reported on `err` as one line:
//   segblend: error: kind=<kind> message=<text>
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Convenience for tests: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segblend::cli
