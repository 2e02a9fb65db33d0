#include "omnipd/config.hpp"

#include <sstream>

namespace omnipd {

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string s = strip(line);
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    std::string key = strip(s.substr(0, eq));
    std::string value = strip(s.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  return parse(read_file(path));
}

std::string KeyValueConfig::get_str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("missing config key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_str(const std::string& key, const std::string& dflt) const {
  auto it = values_.find(key);
  return it == values_.end() ? dflt : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw Error("config key " + key + ": not a number: " + v);
  }
}

double KeyValueConfig::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw Error("config key " + key + ": not an integer: " + v);
  }
}

int KeyValueConfig::get_int(const std::string& key, int dflt) const {
  return has(key) ? get_int(key) : dflt;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t dflt) const {
  if (!has(key)) return dflt;
  return std::stoull(get_str(key));
}

}  // namespace omnipd
