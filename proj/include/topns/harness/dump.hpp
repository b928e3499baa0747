#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file dump.hpp
 * @brief Logit dump files.
 *
 * Binary layout (all integers and floats little-endian):
 *
 *     offset  size  field
 *     0       4     magic "LGTD"
 *     4       2     version (u16) = 1
 *     6       4     V (u32)
 *     10      8     row count (u64)
 *     18      4*V   row 0 as float32
 *     ...
 *
 * Text layout: NDJSON, one object per row,
 *     {"logits": [0.0, 1.0, ...], "token": 17}
 * where "token" (the token chosen at that step) is optional. -inf may be
 * written as null or as the strings "-inf" / "-Infinity".
 *
 * read_dump picks the format from the first four bytes.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "topns/logit_core.hpp"

namespace topns::harness {

struct Dump {
  std::vector<LogitVector> rows;
  std::vector<std::optional<TokenId>> tokens;  ///< parallel to rows
  std::size_t vocab_size = 0;
};

enum class DumpFormat { kBinary, kNdjson };

inline constexpr char kDumpMagic[4] = {'L', 'G', 'T', 'D'};
inline constexpr std::uint16_t kDumpVersion = 1;

/// Throws ParseError naming the offending row on malformed input, NaN, +inf or inconsistent V.
Dump read_dump(const std::filesystem::path& path);
Dump read_dump(std::istream& in);

/// Binary rows are narrowed to float32.
void write_dump(const std::filesystem::path& path, const std::vector<LogitVector>& rows, DumpFormat format,
                const std::vector<std::optional<TokenId>>& tokens = {});
void write_dump(std::ostream& out, const std::vector<LogitVector>& rows, DumpFormat format,
                const std::vector<std::optional<TokenId>>& tokens = {});

}  // namespace topns::harness
