#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace auxss {

// Flat `key = value` configuration. Keys are namespaced by convention
// (`env.dt`, `sampler.delta`, `learner.gamma`, `run.t_max`). Lines starting
// with '#' are comments. Every lookup marks the key as consumed so that
// unknown_keys() can report typos after all modules have read their part.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_string(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Semicolon separated groups of comma separated numbers: "1,2; 3,4".
  std::optional<std::vector<std::vector<double>>> get_groups(const std::string& key) const;

  std::vector<std::string> unknown_keys() const;
  // Throws ConfigError listing every key nobody asked for.
  void require_all_consumed() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> consumed_;
};

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace auxss
