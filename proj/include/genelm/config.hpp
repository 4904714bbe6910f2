#pragma once

// Flat key=value configuration with dotted namespaces, e.g.
//   model.d_llm=128
//   lora.rank=32
// '#' starts a comment; whitespace around keys and values is ignored.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace genelm {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class Config {
 public:
  Config() = default;

  static Config parse(std::istream& is) {
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected key=value");
      }
      std::string key = trim(trimmed.substr(0, eq));
      std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty key");
      }
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  long get_int(const std::string& key, long dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stol(it->second);
    } catch (...) {
      throw ConfigError("config: key " + key + " is not an integer: " +
                        it->second);
    }
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stod(it->second);
    } catch (...) {
      throw ConfigError("config: key " + key + " is not a number: " +
                        it->second);
    }
  }

  bool get_bool(const std::string& key, bool dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config: key " + key + " is not a boolean: " + it->second);
  }

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace genelm
