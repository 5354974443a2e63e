#pragma once

// Flat key = value configuration files with [sections], and locale-independent
// number parsing and formatting.
//
//   # comment
//   key = value
//   [section]
//   key = value
//
// Keys are unique per section. Parse errors carry the line number and key.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srma {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, std::string field, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  int line_;
  std::string field_;
};

/// Parses a whole string as a double / integer; no whitespace, no locale.
/// Throws std::invalid_argument naming `what` on failure.
double parse_double(std::string_view text, std::string_view what = "value");
long parse_long(std::string_view text, std::string_view what = "value");
std::uint64_t parse_u64(std::string_view text, std::string_view what = "value");
bool parse_bool(std::string_view text, std::string_view what = "value");

/// Comma-separated list of doubles, e.g. "0.5, 1, 2".
std::vector<double> parse_double_list(std::string_view text, std::string_view what = "value");

/// 9 significant digits, '.' decimal separator, general notation.
std::string format_double(double value);

struct IniEntry {
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;  // empty for the top level
  int line = 0;
  std::vector<std::pair<std::string, IniEntry>> entries;

  const IniEntry* find(std::string_view key) const;
};

struct IniDocument {
  std::string source;
  std::vector<IniSection> sections;  // sections[0] is the top level
};

IniDocument parse_ini(std::istream& in, std::string source);
IniDocument load_ini(const std::filesystem::path& path);

/// Reads typed values from a section and rejects unknown keys.
class SectionReader {
 public:
  SectionReader(const IniDocument& doc, const IniSection& section)
      : doc_(doc), section_(section) {}

  std::optional<std::string> text(std::string_view key);
  std::optional<double> number(std::string_view key);
  std::optional<long> integer(std::string_view key);
  std::optional<std::uint64_t> unsigned_integer(std::string_view key);
  std::optional<bool> boolean(std::string_view key);
  std::optional<std::vector<double>> number_list(std::string_view key);

  /// Throws ConfigError at `key`'s line.
  [[noreturn]] void fail(std::string_view key, const std::string& message) const;
  /// Throws ConfigError for the first key never read.
  void reject_unknown() const;

 private:
  template <typename T, typename Parse>
  std::optional<T> read(std::string_view key, Parse parse);

  const IniDocument& doc_;
  const IniSection& section_;
  std::vector<std::string> used_;
};

}  // namespace srma
