#include "srma/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace srma {
namespace {

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::string describe(std::string_view what, std::string_view text) {
  return std::string(what) + ": cannot parse '" + std::string(text) + "'";
}

template <typename T>
T parse_integral(std::string_view text, std::string_view what) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw std::invalid_argument(describe(what, text));
  return value;
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, std::string field, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) +
                         (field.empty() ? std::string() : ": field '" + field + "'") + ": " + message),
      source_(std::move(source)),
      line_(line),
      field_(std::move(field)) {}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  std::string_view body = text;
  // from_chars rejects a leading '+'.
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  const char* end = body.data() + body.size();
  auto [ptr, ec] = std::from_chars(body.data(), end, value);
  if (body.empty() || ec != std::errc() || ptr != end) throw std::invalid_argument(describe(what, text));
  return value;
}

long parse_long(std::string_view text, std::string_view what) {
  return parse_integral<long>(text, what);
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  return parse_integral<std::uint64_t>(text, what);
}

bool parse_bool(std::string_view text, std::string_view what) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument(describe(what, text));
}

std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
  std::vector<double> values;
  while (true) {
    const auto comma = text.find(',');
    values.push_back(parse_double(trim(text.substr(0, comma)), what));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 9);
  if (ec != std::errc()) throw std::runtime_error("format_double: buffer too small");
  return std::string(buf.data(), ptr);
}

const IniEntry* IniSection::find(std::string_view key) const {
  for (const auto& [k, entry] : entries)
    if (k == key) return &entry;
  return nullptr;
}

IniDocument parse_ini(std::istream& in, std::string source) {
  IniDocument doc;
  doc.source = std::move(source);
  doc.sections.push_back(IniSection{"", 0, {}});
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(doc.source, line_no, "", "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) throw ConfigError(doc.source, line_no, "", "empty section name");
      for (const auto& s : doc.sections)
        if (s.name == name)
          throw ConfigError(doc.source, line_no, "", "duplicate section [" + name + "]");
      doc.sections.push_back(IniSection{name, line_no, {}});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(doc.source, line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(doc.source, line_no, "", "missing key");
    if (value.empty()) throw ConfigError(doc.source, line_no, key, "missing value");
    IniSection& section = doc.sections.back();
    if (section.find(key)) throw ConfigError(doc.source, line_no, key, "duplicate key");
    section.entries.emplace_back(key, IniEntry{value, line_no});
  }
  return doc;
}

IniDocument load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  return parse_ini(in, path.string());
}

template <typename T, typename Parse>
std::optional<T> SectionReader::read(std::string_view key, Parse parse) {
  used_.emplace_back(key);
  const IniEntry* entry = section_.find(key);
  if (!entry) return std::nullopt;
  try {
    return parse(entry->value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(doc_.source, entry->line, std::string(key), e.what());
  }
}

std::optional<std::string> SectionReader::text(std::string_view key) {
  return read<std::string>(key, [](const std::string& v) { return v; });
}

std::optional<double> SectionReader::number(std::string_view key) {
  return read<double>(key, [](const std::string& v) { return parse_double(v, "number"); });
}

std::optional<long> SectionReader::integer(std::string_view key) {
  return read<long>(key, [](const std::string& v) { return parse_long(v, "integer"); });
}

std::optional<std::uint64_t> SectionReader::unsigned_integer(std::string_view key) {
  return read<std::uint64_t>(key, [](const std::string& v) { return parse_u64(v, "unsigned integer"); });
}

std::optional<bool> SectionReader::boolean(std::string_view key) {
  return read<bool>(key, [](const std::string& v) { return parse_bool(v, "boolean"); });
}

std::optional<std::vector<double>> SectionReader::number_list(std::string_view key) {
  return read<std::vector<double>>(key, [](const std::string& v) { return parse_double_list(v, "number list"); });
}

void SectionReader::fail(std::string_view key, const std::string& message) const {
  const IniEntry* entry = section_.find(key);
  throw ConfigError(doc_.source, entry ? entry->line : section_.line, std::string(key), message);
}

void SectionReader::reject_unknown() const {
  for (const auto& [key, entry] : section_.entries)
    if (std::find(used_.begin(), used_.end(), key) == used_.end())
      throw ConfigError(doc_.source, entry.line, key, "unknown key");
}

}  // namespace srma
