#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace slbf::cli {

/// Process exit codes. Part of the command-line contract.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kOverflow = 3,
  kUnderpowered = 4,
};

/// FNV-1a 64 of a text token. Maps tokens to integers before they are reduced
/// into the universe; unrelated to the filter's fingerprint hash.
std::uint64_t token_hash(std::string_view token) noexcept;

/// Runs the `slbf` command line with explicit streams so it can be driven from tests.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace slbf::cli
