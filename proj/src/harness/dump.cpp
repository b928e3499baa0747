// SPDX-License-Identifier: Apache-2.0

#include "topns/harness/dump.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "json.hpp"
#include "topns/error.hpp"

namespace topns::harness {

namespace {

using json = nlohmann::json;

template <typename U>
U read_le(std::istream& in, const char* field) {
  std::array<unsigned char, sizeof(U)> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), b.size()))
    throw ParseError(std::string("truncated binary dump header (") + field + ")");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

template <typename U>
void write_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> b{};
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

LogitVector make_row(std::vector<double> values, long long row) {
  for (double v : values) {
    if (std::isnan(v)) throw ParseError("NaN logit", row);
    if (v == std::numeric_limits<double>::infinity()) throw ParseError("+inf logit", row);
  }
  try {
    return LogitVector(std::move(values));
  } catch (const Error& e) {
    throw ParseError(e.what(), row);
  }
}

Dump read_binary(std::istream& in) {
  const auto version = read_le<std::uint16_t>(in, "version");
  if (version != kDumpVersion) throw ParseError("unsupported binary dump version " + std::to_string(version));
  const auto vocab = read_le<std::uint32_t>(in, "V");
  const auto rows = read_le<std::uint64_t>(in, "row count");
  if (vocab == 0) throw ParseError("binary dump declares V = 0");

  Dump d;
  d.vocab_size = vocab;
  std::vector<unsigned char> buf(static_cast<std::size_t>(vocab) * 4);
  for (std::uint64_t r = 0; r < rows; ++r) {
    const auto row = static_cast<long long>(r);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
      throw ParseError("truncated row", row);
    std::vector<double> values(vocab);
    for (std::size_t i = 0; i < vocab; ++i) {
      const std::uint32_t bits = static_cast<std::uint32_t>(buf[4 * i]) |
                                 static_cast<std::uint32_t>(buf[4 * i + 1]) << 8 |
                                 static_cast<std::uint32_t>(buf[4 * i + 2]) << 16 |
                                 static_cast<std::uint32_t>(buf[4 * i + 3]) << 24;
      values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    d.rows.push_back(make_row(std::move(values), row));
    d.tokens.emplace_back();
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after the declared rows");
  return d;
}

double json_logit(const json& v, long long row) {
  if (v.is_null()) return -std::numeric_limits<double>::infinity();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError("logits entries must be numbers, null or \"-inf\"", row);
}

Dump read_ndjson(std::istream& in) {
  Dump d;
  std::string line;
  long long row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), row);
    }
    if (!obj.is_object() || !obj.contains("logits") || !obj["logits"].is_array())
      throw ParseError("expected an object with a \"logits\" array", row);
    const auto& arr = obj["logits"];
    std::vector<double> values;
    values.reserve(arr.size());
    for (const auto& v : arr) values.push_back(json_logit(v, row));
    if (d.rows.empty()) {
      d.vocab_size = values.size();
    } else if (values.size() != d.vocab_size) {
      throw ParseError("row has " + std::to_string(values.size()) + " logits, expected " +
                           std::to_string(d.vocab_size),
                       row);
    }
    std::optional<TokenId> token;
    if (obj.contains("token") && !obj["token"].is_null()) {
      if (!obj["token"].is_number_unsigned()) throw ParseError("\"token\" must be a non-negative integer", row);
      token = obj["token"].get<TokenId>();
      if (*token >= values.size()) throw ParseError("\"token\" out of range", row);
    }
    d.rows.push_back(make_row(std::move(values), row));
    d.tokens.push_back(token);
    ++row;
  }
  return d;
}

}  // namespace

Dump read_dump(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kDumpMagic, 4) == 0) return read_binary(in);
  in.clear();
  in.seekg(0);
  return read_ndjson(in);
}

Dump read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dump " + path.string());
  return read_dump(in);
}

void write_dump(std::ostream& out, const std::vector<LogitVector>& rows, DumpFormat format,
                const std::vector<std::optional<TokenId>>& tokens) {
  if (!tokens.empty() && tokens.size() != rows.size())
    throw InvalidParameter("token list must be empty or parallel to rows");
  const std::size_t vocab = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows)
    if (r.size() != vocab) throw InvalidParameter("all rows of a dump must share one vocabulary size");

  if (format == DumpFormat::kBinary) {
    if (vocab > std::numeric_limits<std::uint32_t>::max()) throw InvalidParameter("V exceeds u32");
    out.write(kDumpMagic, 4);
    write_le<std::uint16_t>(out, kDumpVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(vocab));
    write_le<std::uint64_t>(out, rows.size());
    for (const auto& r : rows)
      for (double v : r) write_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    return;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    json obj;
    json arr = json::array();
    for (double v : rows[i]) arr.push_back(std::isfinite(v) ? json(v) : json(nullptr));
    obj["logits"] = std::move(arr);
    if (!tokens.empty() && tokens[i]) obj["token"] = *tokens[i];
    out << obj.dump() << '\n';
  }
}

void write_dump(const std::filesystem::path& path, const std::vector<LogitVector>& rows, DumpFormat format,
                const std::vector<std::optional<TokenId>>& tokens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dump(out, rows, format, tokens);
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace topns::harness
