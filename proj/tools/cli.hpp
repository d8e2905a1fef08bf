#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cohesion/config.hpp"

namespace cohesion::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

/// Entry point of the `cohesion` tool: run | compare | sweep.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "0,0.05,...,0.5" (arithmetic fill), "0:0.05:0.5" (start:step:stop) or a plain list.
std::vector<double> parse_sigmas(const std::string& text);

/// "0..9" (inclusive range) or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& text);

}  // namespace cohesion::cli
