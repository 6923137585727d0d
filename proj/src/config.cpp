#include "singsurf/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "singsurf/csv.hpp"
#include "singsurf/errors.hpp"

namespace singsurf::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("key '" + key + "' needs a number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + t + "' is not a number");
  }
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "' must be finite");
  return v;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": empty key");
    c.set(key, trim(t.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) { return parse(io::read_text(path), path.string()); }

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void Config::set(const std::string& key, double value) { entries_[key] = io::format_double(value); }

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::erase(const std::string& key) { entries_.erase(key); }

std::string Config::get(const std::string& key, const std::string& fallback) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : to_double(key, it->second);
}

std::size_t Config::get_size(const std::string& key, std::size_t fallback) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const double v = to_double(key, it->second);
  if (v < 0.0 || v != std::floor(v) || v > 1e15) {
    throw ConfigError("key '" + key + "' needs a non-negative integer, got '" + it->second + "'");
  }
  return static_cast<std::size_t>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' needs true or false, got '" + it->second + "'");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  used_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

bool Config::informational(const std::string& key) {
  for (const char* prefix : {"derived.", "counters.", "run."}) {
    if (key.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

void Config::reject_unused() const {
  for (const auto& [k, v] : entries_) {
    if (!informational(k) && used_.count(k) == 0) throw ConfigError("unknown key '" + k + "'");
  }
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += io::format_double(values[i]);
  }
  return out;
}

}  // namespace singsurf::config
