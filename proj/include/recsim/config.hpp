#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace recsim {

/// Raised for unreadable files, malformed lines, unknown keys and
/// out-of-range values. The message carries "source:line: ..." when the
/// problem can be pinned to a line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text. Blank lines and `#` comments are ignored; list
/// values are comma-separated. Every key must be consumed by a typed getter
/// before finish(), otherwise it is reported as unknown.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, std::string source = "<config>");
  static ConfigFile parse_text(std::string_view text, std::string source = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(std::string_view key) const;

  // Each getter leaves `out` untouched when the key is absent.
  void get(std::string_view key, double& out);
  void get(std::string_view key, std::int64_t& out);
  void get(std::string_view key, int& out);
  void get(std::string_view key, std::uint64_t& out);
  void get(std::string_view key, bool& out);
  void get(std::string_view key, std::string& out);
  void get(std::string_view key, std::vector<double>& out);
  void get(std::string_view key, std::vector<std::int64_t>& out);

  /// Throws on the first key no getter asked for.
  void finish() const;

  /// "source:line" for a present key, otherwise just "source".
  std::string where(std::string_view key) const;
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  const Entry* lookup(std::string_view key);
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

  std::map<std::string, Entry, std::less<>> entries_;
  std::string source_;
};

/// Runs `validate` and re-throws std::invalid_argument as a ConfigError that
/// points at the line of the offending key (validation messages start with
/// the field name).
template <typename Validate>
void validate_config(const ConfigFile& cfg, Validate&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    std::string key = colon == std::string::npos ? std::string{} : msg.substr(0, colon);
    if (const auto slash = key.find('/'); slash != std::string::npos) key = key.substr(0, slash);
    throw ConfigError(cfg.where(key) + ": " + msg);
  }
}

}  // namespace recsim
