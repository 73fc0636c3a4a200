#include "qeilab/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qeilab::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  return true;
}

std::string field_name(const ConfigEntry& e) { return e.section + "." + e.key; }

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(',');
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) break;
    s = s.substr(p + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, const ConfigEntry& e, const char* what) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(e.line, field_name(e), std::string("expected ") + what + ", got '" +
                                                 std::string(s) + "'");
  return v;
}

}  // namespace

std::string ConfigError::format(int line, const std::string& field, const std::string& what) {
  std::ostringstream os;
  os << "config";
  if (line > 0) os << " line " << line;
  if (!field.empty()) os << " [" << field << "]";
  os << ": " << what;
  return os.str();
}

ConfigFile ConfigFile::parse(std::string_view text) {
  ConfigFile cfg;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "", "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) throw ConfigError(line_no, "", "invalid section name");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    if (section.empty()) throw ConfigError(line_no, "", "key outside of any section");
    const auto key = trim(line.substr(0, eq));
    if (!valid_name(key)) throw ConfigError(line_no, "", "invalid key name");
    if (cfg.find(section, key))
      throw ConfigError(line_no, section + "." + std::string(key), "duplicate key");
    cfg.entries_.push_back({section, std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str());
}

const ConfigEntry* ConfigFile::find(std::string_view section, std::string_view key) const {
  for (const auto& e : entries_)
    if (e.section == section && e.key == key) return &e;
  return nullptr;
}

void ConfigFile::set(const std::string& section, const std::string& key, std::string value) {
  for (auto& e : entries_)
    if (e.section == section && e.key == key) {
      e.value = std::move(value);
      return;
    }
  // Keep sections contiguous: insert after the last entry of the section.
  auto pos = entries_.end();
  for (auto it = entries_.begin(); it != entries_.end(); ++it)
    if (it->section == section) pos = it + 1;
  entries_.insert(pos, {section, key, std::move(value), 0});
}

std::string ConfigFile::serialize() const {
  std::string out;
  std::string section;
  for (const auto& e : entries_) {
    if (e.section != section || out.empty()) {
      if (!out.empty()) out += '\n';
      out += "[" + e.section + "]\n";
      section = e.section;
    }
    out += e.key + " = " + e.value + "\n";
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const ConfigEntry& e) {
  const double v = parse_number<double>(e.value, e, "a number");
  if (!std::isfinite(v)) throw ConfigError(e.line, field_name(e), "value must be finite");
  return v;
}

long long parse_int(const ConfigEntry& e) { return parse_number<long long>(e.value, e, "an integer"); }

std::uint64_t parse_u64(const ConfigEntry& e) {
  return parse_number<std::uint64_t>(e.value, e, "an unsigned integer");
}

bool parse_bool(const ConfigEntry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError(e.line, field_name(e), "expected true or false, got '" + e.value + "'");
}

std::vector<double> parse_double_list(const ConfigEntry& e) {
  std::vector<double> out;
  if (trim(e.value).empty()) return out;
  for (auto item : split_list(e.value)) {
    const double v = parse_number<double>(item, e, "a number list");
    if (!std::isfinite(v)) throw ConfigError(e.line, field_name(e), "value must be finite");
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const ConfigEntry& e) {
  std::vector<int> out;
  if (trim(e.value).empty()) return out;
  for (auto item : split_list(e.value)) out.push_back(parse_number<int>(item, e, "an integer list"));
  return out;
}

}  // namespace qeilab::cli
