#pragma once

#include <iosfwd>

namespace bnmf::cli {

// Exit codes of the bnmf tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;      // parse, validation, parameter or I/O error
inline constexpr int kExitNumerical = 2;  // non-finite energy during a fit

// Environment variable naming the directory for reports written without -o.
inline constexpr const char* kOutputDirEnv = "BNMF_OUTPUT_DIR";

// Entry point shared by main() and the tests. Results go to `out`, all
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bnmf::cli
