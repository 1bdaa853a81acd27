#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bswave/errors.hpp"

namespace bswave {

/// Flat key-value configuration with `[section]` headers, `#` comments and
/// `key = value` lines. Section and key names are case-sensitive.
class Config {
 public:
  using Section = std::map<std::string, std::string>;

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    return parse_stream(in, path);
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse_stream(in, "<string>");
  }

  static Config parse_stream(std::istream& in, const std::string& name) {
    Config cfg;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return std::string();
        auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ParseError(name + ":" + std::to_string(line_no) +
                           ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        cfg.sections_[section];
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError(name + ":" + std::to_string(line_no) +
                         ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ParseError(name + ":" + std::to_string(line_no) + ": empty key");
      // repeated keys accumulate (used for gauge lists)
      auto& slot = cfg.sections_[section][key];
      if (slot.empty())
        slot = value;
      else
        slot += "\n" + value;
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  bool has_section(const std::string& section) const {
    return sections_.count(section) > 0;
  }

  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
  }

  std::string require_string(const std::string& section,
                             const std::string& key) const {
    auto v = get(section, key);
    if (!v)
      throw ParseError("config: missing required key [" + section + "] " +
                       key);
    return *v;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    auto v = get(section, key);
    return v ? to_double(section, key, *v) : fallback;
  }

  double require_double(const std::string& section,
                        const std::string& key) const {
    return to_double(section, key, require_string(section, key));
  }

  int get_int(const std::string& section, const std::string& key,
              int fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    double d = to_double(section, key, *v);
    int i = static_cast<int>(d);
    if (d != i)
      throw ParseError("config: [" + section + "] " + key +
                       " must be an integer");
    return i;
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "on" || *v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "off" || *v == "false" || *v == "no" || *v == "0") return false;
    throw ParseError("config: [" + section + "] " + key +
                     " must be on/off (got '" + *v + "')");
  }

  /// Multi-valued key: one entry per repeated `key = ...` line.
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(section, key);
    if (!v) return out;
    std::istringstream ss(*v);
    std::string item;
    while (std::getline(ss, item)) out.push_back(item);
    return out;
  }

  const std::map<std::string, Section>& sections() const { return sections_; }

  /// Overlay `other` on top of this config: keys in `other` win.
  Config merged_with(const Config& other) const {
    Config out = *this;
    for (const auto& [sec, kv] : other.sections_)
      for (const auto& [k, v] : kv) out.sections_[sec][k] = v;
    return out;
  }

  void set(const std::string& section, const std::string& key,
           const std::string& value) {
    sections_[section][key] = value;
  }

  /// Validate against a schema: map of section -> allowed keys. Unknown
  /// sections or keys produce an exhaustive error list.
  void check_known_keys(
      const std::map<std::string, std::vector<std::string>>& schema) const {
    std::vector<std::string> problems;
    for (const auto& [sec, kv] : sections_) {
      auto it = schema.find(sec);
      if (it == schema.end()) {
        problems.push_back("unknown section [" + sec + "]");
        continue;
      }
      for (const auto& [key, value] : kv) {
        (void)value;
        bool ok = false;
        for (const auto& allowed : it->second)
          if (key == allowed) {
            ok = true;
            break;
          }
        if (!ok) problems.push_back("unknown key [" + sec + "] " + key);
      }
    }
    if (!problems.empty()) {
      std::string msg = "config validation failed:";
      for (const auto& p : problems) msg += "\n  - " + p;
      throw ParseError(msg);
    }
  }

 private:
  static double to_double(const std::string& section, const std::string& key,
                          const std::string& value) {
    try {
      size_t pos = 0;
      double d = std::stod(value, &pos);
      while (pos < value.size() && std::isspace(value[pos])) ++pos;
      if (pos != value.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ParseError("config: [" + section + "] " + key +
                       " is not a number (got '" + value + "')");
    }
  }

  std::map<std::string, Section> sections_;
};

}  // namespace bswave
