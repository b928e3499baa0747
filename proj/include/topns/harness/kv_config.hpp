#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file kv_config.hpp
 * @brief Plain-text `key = value` configuration for mixture specs and
 *        majority-vote tasks.
 *
 * One pair per line, `#` starts a comment, list values are comma separated.
 *
 *     # mixture
 *     vocab_size  = 1000
 *     noise_mu    = 0
 *     noise_sigma = 1
 *     offsets     = 0, 0.405465
 *     target_max  = 10
 *     seed        = 42
 *     uniform_width = 2.0        # optional
 *
 *     # majority-vote task (in addition to the mixture keys)
 *     num_answers    = 3
 *     answer_map     = 0:1, 1:0   # token:label
 *     unmapped_label = 2          # optional
 *     correct_answer = 1
 *     N              = 20
 *     queries        = 200        # optional
 *     temperatures   = 1, 1.5, 2, 3
 */

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "topns/synth.hpp"

namespace topns::harness {

class KeyValueConfig {
 public:
  /// Throws ParseError (with the line number) on a malformed line or duplicate key.
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  /// Throws ParseError naming the first key outside `allowed`.
  void require_only(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Keys read by mixture_from_config.
const std::set<std::string>& mixture_keys();

/// Reads the mixture keys; missing optional keys keep MixtureSpec defaults.
MixtureSpec mixture_from_config(const KeyValueConfig& cfg);

std::string mixture_to_config(const MixtureSpec& spec);

}  // namespace topns::harness
