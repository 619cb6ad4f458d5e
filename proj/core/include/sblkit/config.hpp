#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sblkit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` file with [section] headers, '#' comments, and strict
/// validation: every key must be consumed by a typed getter, and
/// ensure_fully_consumed() rejects anything left over. Duplicate keys and
/// malformed lines are parse errors.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int_or(const std::string& section, const std::string& key,
                       long long fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  /// Whitespace-separated list of doubles.
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  /// Whitespace-separated list of words.
  std::vector<std::string> get_words(const std::string& section, const std::string& key) const;

  /// Throws ConfigError naming the first key nothing ever read.
  void ensure_fully_consumed() const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
  mutable std::set<std::string> consumed_;  // "section.key"

  const std::string* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void missing(const std::string& section, const std::string& key) const;
};

}  // namespace sblkit
