#include "cda/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cda {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigMap ConfigMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected key=value, got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (!cfg.kv_.emplace(key, val).second)
      throw ValidationError("config key '" + key + "' given twice");
  }
  return cfg;
}

bool ConfigMap::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string ConfigMap::get(const std::string& key, const std::string& fallback) {
  consumed_.insert(key);
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string ConfigMap::require(const std::string& key) {
  consumed_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw ValidationError("config key '" + key + "' is required");
  return it->second;
}

double ConfigMap::number(const std::string& key, double fallback) {
  std::string v = get(key, "");
  if (v.empty()) return fallback;
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': '" + v + "' is not a number");
  }
}

long ConfigMap::integer(const std::string& key, long fallback) {
  double d = number(key, static_cast<double>(fallback));
  long l = static_cast<long>(d);
  if (static_cast<double>(l) != d)
    throw ValidationError("config key '" + key + "' must be an integer");
  return l;
}

std::uint64_t ConfigMap::seed(const std::string& key) {
  std::string v = require(key);
  try {
    // stoull silently wraps negatives, so reject them up front
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    std::size_t pos = 0;
    unsigned long long s = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "': '" + v +
                          "' is not a valid seed");
  }
}

bool ConfigMap::flag(const std::string& key, bool fallback) {
  std::string v = get(key, "");
  if (v.empty()) return fallback;
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ValidationError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<std::string> ConfigMap::list(const std::string& key) {
  std::string v = get(key, "");
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size() && !v.empty()) {
    std::size_t comma = v.find(',', start);
    std::string item = trim(v.substr(start, comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void ConfigMap::finish() const {
  std::string unknown;
  for (const auto& [k, v] : kv_)
    if (!consumed_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty())
    throw ValidationError("unknown config keys: " + unknown);
}

Roles roles_from_config(ConfigMap& cfg) {
  Roles r;
  r.group = cfg.require("role.group");
  r.outcome = cfg.require("role.outcome");
  r.z = cfg.list("role.z");
  if (r.z.empty()) throw ValidationError("config key 'role.z' is required");
  r.binary_outcome = cfg.get("role.binary_outcome", "");
  r.censor = cfg.get("role.censor", "");
  r.cluster = cfg.get("role.cluster", "");
  r.standard_pop = cfg.get("role.standard_pop", "");
  r.ay = cfg.list("role.ay");
  r.az = cfg.list("role.az");
  r.n = cfg.list("role.n");
  return r;
}

void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write to '" + tmp + "'");
    out << content;
    if (!out) throw ValidationError("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::string err = std::strerror(errno);
    std::remove(tmp.c_str());
    throw ValidationError("cannot rename '" + tmp + "' to '" + path + "': " + err);
  }
}

std::string format_number(double v, int sig) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, v);
  return buf;
}

}  // namespace cda
