// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spadfab/errors.hpp"

namespace spadfab {

/// Line-based `key = value` document. '#' starts a comment, blank lines are
/// ignored, keys are unique. Reads are tracked so finish() can reject
/// misspelled keys instead of silently ignoring them.
class ConfigDoc {
 public:
  static ConfigDoc parse(std::istream& is) {
    ConfigDoc doc;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const std::string key = trim(line.substr(0, line.find('=')));
      if (key.empty()) {
        if (!trim(line).empty())
          throw ParseError("expected `key = value`", lineno, trim(line));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("expected `key = value`", lineno, key);
      const std::string value = trim(line.substr(eq + 1));
      if (value.empty())
        throw ParseError("missing value for key", lineno, key);
      if (!doc.entries_.emplace(key, Entry{value, lineno, false}).second)
        throw ParseError("duplicate key", lineno, key);
    }
    return doc;
  }

  static ConfigDoc parse_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    return entry(key).value;
  }
  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  double get_double(const std::string& key) const {
    const Entry& e = entry(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument(e.value);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected a number for key '" + key + "'", e.line,
                       e.value);
    }
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::int64_t get_int(const std::string& key) const {
    const Entry& e = entry(key);
    std::int64_t v = 0;
    const char* b = e.value.data();
    const char* z = b + e.value.size();
    auto [p, ec] = std::from_chars(b, z, v);
    if (ec != std::errc() || p != z)
      throw ParseError("expected an integer for key '" + key + "'", e.line,
                       e.value);
    return v;
  }
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  bool get_bool(const std::string& key) const {
    const Entry& e = entry(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ParseError("expected true/false for key '" + key + "'", e.line,
                     e.value);
  }
  bool get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
  }

  /// Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key) const {
    const Entry& e = entry(key);
    std::vector<double> out;
    std::string item;
    std::istringstream is(e.value);
    while (std::getline(is, item, ',')) {
      item = trim(item);
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ParseError("expected a number list for key '" + key + "'",
                         e.line, item);
      }
    }
    if (out.empty())
      throw ParseError("empty list for key '" + key + "'", e.line, e.value);
    return out;
  }

  /// Throws if any key was never read; catches typos in config files.
  void finish() const {
    for (const auto& [key, e] : entries_)
      if (!e.consumed)
        throw ParseError("unknown key '" + key + "'", e.line, key);
  }

 private:
  struct Entry {
    std::string value;
    int line;
    mutable bool consumed;
  };

  const Entry& entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError("missing required key '" + key + "'");
    it->second.consumed = true;
    return it->second;
  }

  static std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return {};
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, Entry> entries_;
};

}  // namespace spadfab
