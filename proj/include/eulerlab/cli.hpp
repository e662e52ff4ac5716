#pragma once

// Command-line front end. Subcommands: simulate, besov-fit, commutator-rate,
// relentropy, oslip-check, verify-thermo, accept.
//
// Exit codes: 0 pass, 1 fail (a check did not hold or the computation
// aborted), 2 usage error (bad flag, malformed config; the message names the
// offending field).

#include <iosfwd>
#include <string>
#include <vector>

namespace eulerlab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, const char* const* argv);

}  // namespace eulerlab::cli
