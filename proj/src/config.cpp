#include "recsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace recsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    parts.push_back(trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, std::string source) {
  ConfigFile cfg;
  cfg.source_ = std::move(source);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    if (const auto hash = text.find('#'); hash != text.npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string prefix = cfg.source_ + ":" + std::to_string(line) + ": ";
    if (eq == text.npos) throw ConfigError(prefix + "expected 'key = value'");
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(prefix + "malformed key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(prefix + "missing value for '" + std::string(key) + "'");
    const auto [it, inserted] = cfg.entries_.emplace(std::string(key), Entry{std::string(value), line});
    if (!inserted)
      throw ConfigError(prefix + "duplicate key '" + std::string(key) + "' (first set on line " +
                        std::to_string(it->second.line) + ")");
  }
  return cfg;
}

ConfigFile ConfigFile::parse_text(std::string_view text, std::string source) {
  std::istringstream in{std::string(text)};
  return parse(in, std::move(source));
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse(in, path.string());
}

bool ConfigFile::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const ConfigFile::Entry* ConfigFile::lookup(std::string_view key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

std::string ConfigFile::where(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return source_;
  return source_ + ":" + std::to_string(it->second.line);
}

void ConfigFile::fail(std::string_view key, const std::string& what) const {
  throw ConfigError(where(key) + ": " + std::string(key) + ": " + what);
}

void ConfigFile::get(std::string_view key, double& out) {
  if (const Entry* e = lookup(key)) {
    if (!parse_number(e->value, out)) fail(key, "expected a real number, got '" + e->value + "'");
  }
}

void ConfigFile::get(std::string_view key, std::int64_t& out) {
  if (const Entry* e = lookup(key)) {
    if (!parse_number(e->value, out)) fail(key, "expected an integer, got '" + e->value + "'");
  }
}

void ConfigFile::get(std::string_view key, int& out) {
  std::int64_t wide = out;
  get(key, wide);
  if (wide < INT32_MIN || wide > INT32_MAX) fail(key, "integer out of range");
  out = static_cast<int>(wide);
}

void ConfigFile::get(std::string_view key, std::uint64_t& out) {
  if (const Entry* e = lookup(key)) {
    if (!parse_number(e->value, out))
      fail(key, "expected a non-negative integer, got '" + e->value + "'");
  }
}

void ConfigFile::get(std::string_view key, bool& out) {
  if (const Entry* e = lookup(key)) {
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes")
      out = true;
    else if (v == "false" || v == "0" || v == "no")
      out = false;
    else
      fail(key, "expected true/false, got '" + e->value + "'");
  }
}

void ConfigFile::get(std::string_view key, std::string& out) {
  if (const Entry* e = lookup(key)) out = e->value;
}

void ConfigFile::get(std::string_view key, std::vector<double>& out) {
  if (const Entry* e = lookup(key)) {
    std::vector<double> values;
    for (auto part : split_list(e->value)) {
      double v = 0.0;
      if (!parse_number(part, v)) fail(key, "bad list element '" + std::string(part) + "'");
      values.push_back(v);
    }
    out = std::move(values);
  }
}

void ConfigFile::get(std::string_view key, std::vector<std::int64_t>& out) {
  if (const Entry* e = lookup(key)) {
    std::vector<std::int64_t> values;
    for (auto part : split_list(e->value)) {
      std::int64_t v = 0;
      if (!parse_number(part, v)) fail(key, "bad list element '" + std::string(part) + "'");
      values.push_back(v);
    }
    out = std::move(values);
  }
}

void ConfigFile::finish() const {
  for (const auto& [key, entry] : entries_)
    if (!entry.used)
      throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
}

}  // namespace recsim
