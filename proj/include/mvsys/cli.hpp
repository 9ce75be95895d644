#pragma once

namespace mvsys {

inline constexpr const char* kToolVersion = "mvsys 1.0.0";

// Exit codes: 0 stable / pass / gains found; 1 unstable, marginal, mismatch
// or not found; 2 malformed input; 3 valid input outside the supported
// combinations; 4 internal error.
int run_cli(int argc, const char* const* argv);

}  // namespace mvsys
