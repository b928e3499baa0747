// SPDX-License-Identifier: Apache-2.0

#include "topns/harness/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "topns/error.hpp"

namespace topns::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& key) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ParseError("config key '" + key + "': '" + std::string(text) + "' is not a number");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  long long line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("config line " + std::to_string(line_no) + " is not key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + " has an empty key");
    if (!cfg.values_.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
      throw ParseError("config key '" + key + "' repeated on line " + std::to_string(line_no));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  auto v = raw(key);
  if (!v) throw ParseError("config key '" + key + "' is missing");
  return *v;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_number<double>(get_string(key), key);
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key) const {
  return parse_number<std::uint64_t>(get_string(key), key);
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const std::string text = get_string(key);
  std::vector<double> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) throw ParseError("config key '" + key + "' has an empty list item");
    out.push_back(parse_number<double>(item, key));
  }
  return out;
}

void KeyValueConfig::require_only(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_)
    if (!allowed.count(key)) throw ParseError("unknown config key '" + key + "'");
}

const std::set<std::string>& mixture_keys() {
  static const std::set<std::string> keys = {"vocab_size", "noise_mu", "noise_sigma", "offsets",
                                             "target_max", "seed",     "uniform_width"};
  return keys;
}

MixtureSpec mixture_from_config(const KeyValueConfig& cfg) {
  MixtureSpec spec;
  if (cfg.has("vocab_size")) spec.vocab_size = static_cast<std::size_t>(cfg.get_u64("vocab_size"));
  if (cfg.has("noise_mu")) spec.noise.mu = cfg.get_double("noise_mu");
  if (cfg.has("noise_sigma")) spec.noise.sigma = cfg.get_double("noise_sigma");
  if (cfg.has("offsets")) spec.informative_offsets = cfg.get_doubles("offsets");
  if (cfg.has("target_max")) spec.target_max = cfg.get_double("target_max");
  if (cfg.has("seed")) spec.seed = cfg.get_u64("seed");
  if (cfg.has("uniform_width")) spec.uniform_width = cfg.get_double("uniform_width");
  spec.validate();
  return spec;
}

std::string mixture_to_config(const MixtureSpec& spec) {
  std::ostringstream os;
  os << "vocab_size = " << spec.vocab_size << "\n"
     << "noise_mu = " << format_double(spec.noise.mu) << "\n"
     << "noise_sigma = " << format_double(spec.noise.sigma) << "\n"
     << "offsets = ";
  for (std::size_t j = 0; j < spec.informative_offsets.size(); ++j)
    os << (j ? ", " : "") << format_double(spec.informative_offsets[j]);
  os << "\ntarget_max = " << format_double(spec.target_max) << "\n"
     << "seed = " << spec.seed << "\n";
  if (spec.uniform_width) os << "uniform_width = " << format_double(*spec.uniform_width) << "\n";
  return os.str();
}

}  // namespace topns::harness
