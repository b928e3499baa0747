#pragma once

// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <string_view>
#include <vector>

namespace topns::harness {

/// Shortest decimal that parses back to the same double ("nan"/"inf"/"-inf" for non-finite).
std::string format_real(double v);

/// Inverse of format_real. Throws ParseError on malformed text.
double parse_real(std::string_view text);

/// Splits one CSV line on commas (no quoting; every field this tool writes is quote-free).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace topns::harness
