#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cda/dataset.hpp"

namespace cda {

/// Flat key=value run configuration. '#' starts a comment; keys and
/// values are whitespace-trimmed. Every key must be consumed by the run;
/// leftovers are reported as unknown keys.
class ConfigMap {
 public:
  static ConfigMap load(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback);
  std::string require(const std::string& key);
  double number(const std::string& key, double fallback);
  long integer(const std::string& key, long fallback);
  std::uint64_t seed(const std::string& key);  // required, errors name the key
  bool flag(const std::string& key, bool fallback);
  std::vector<std::string> list(const std::string& key);  // comma-split, may be absent

  /// Throws ValidationError naming any key never consumed.
  void finish() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

/// role.* keys -> Roles (role.group and role.outcome and role.z required).
Roles roles_from_config(ConfigMap& cfg);

/// Writes content to path via a temp file + rename so failures never
/// leave a partial output behind.
void write_atomic(const std::string& path, const std::string& content);

/// 6-significant-digit default formatting for output tables.
std::string format_number(double v, int sig = 6);

}  // namespace cda
