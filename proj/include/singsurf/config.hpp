#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace singsurf::config {

// Flat "key = value" settings. Blank lines and lines starting with '#' are
// ignored; a later assignment to the same key wins. Keys under the
// informational prefixes (derived., counters., run.) are kept for display
// but never read by a solver, so a written manifest loads back as a config.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "config");  // throws ConfigError
  static Config load(const std::filesystem::path& path);  // IoError, ConfigError

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void merge(const Config& other);  // other's values win
  bool has(const std::string& key) const;
  void erase(const std::string& key);

  // Typed reads; each marks the key as used. Bad values throw ConfigError
  // naming the key.
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  // Throws ConfigError naming the first key that is neither informational
  // nor read since construction.
  void reject_unused() const;

  static bool informational(const std::string& key);

  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::string to_text() const;  // sorted, one "key = value" per line

 private:
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

std::string format_list(const std::vector<double>& values);

}  // namespace singsurf::config
