#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpp {

/// Flat `key = value` text store used for distribution specs, experiment
/// configs and metadata echoes. Lines starting with '#' are comments; keys are
/// unique; serialization is sorted by key so it round-trips byte-for-byte.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void set_number(const std::string& key, double value);
  void erase(const std::string& key) { values_.erase(key); }

  /// Raw value; throws ConfigInvalid when missing.
  const std::string& get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Entries whose key starts with `prefix`, with the prefix stripped.
  KeyValueConfig subtree(const std::string& prefix) const;
  /// Copies every entry of `other` under `prefix`.
  void merge(const KeyValueConfig& other, const std::string& prefix = "");

  const std::map<std::string, std::string>& entries() const noexcept { return values_; }
  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest-roundtrip is not required; every number is printed with 17
/// significant digits so that outputs compare byte-for-byte.
std::string format_number(double value);

/// Parses a double, accepting "inf"/"+inf"/"-inf"; throws ConfigInvalid.
double parse_number(std::string_view text, std::string_view what);

/// FNV-1a, stable across platforms; used for config hashes.
std::uint64_t fnv1a64(std::string_view text) noexcept;

}  // namespace fpp
