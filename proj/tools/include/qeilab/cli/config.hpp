#pragma once

// Line-oriented sectioned key/value files:
//
//   # comment
//   [section]
//   key = value   # trailing comment
//
// Keys are unique within a section; order of appearance is kept.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qeilab::cli {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& what)
      : std::runtime_error(format(line, field, what)), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(int line, const std::string& field, const std::string& what);
  int line_;
  std::string field_;
};

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text);
  static ConfigFile load(const std::string& path);

  const std::vector<ConfigEntry>& entries() const { return entries_; }
  const ConfigEntry* find(std::string_view section, std::string_view key) const;
  void set(const std::string& section, const std::string& key, std::string value);
  std::string serialize() const;

 private:
  std::vector<ConfigEntry> entries_;
};

// Shortest round-trip decimal form.
std::string format_double(double v);

double parse_double(const ConfigEntry& e);
long long parse_int(const ConfigEntry& e);
std::uint64_t parse_u64(const ConfigEntry& e);
bool parse_bool(const ConfigEntry& e);
std::vector<double> parse_double_list(const ConfigEntry& e);
std::vector<int> parse_int_list(const ConfigEntry& e);

}  // namespace qeilab::cli
