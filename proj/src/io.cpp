#include "resedf/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "resedf/errors.hpp"

namespace resedf::io {

std::string trim(const std::string& s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delimiter)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delimiter)) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == delimiter) {
    out.emplace_back();
  }
  return out;
}

bool parse_double(const std::string& text, double& out)
{
  if (text.empty()) {
    return false;
  }
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string format_number(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Dataset parse_dataset(std::istream& in)
{
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(trim(line), ',');
      break;
    }
  }
  if (header.size() < 3 || header[header.size() - 2] != "y" || header.back() != "delta") {
    throw DataFormatError("missing or malformed header: expected x1,...,xm,y,delta", line_no == 0 ? 1 : line_no);
  }
  const std::size_t m = header.size() - 2;
  for (std::size_t k = 0; k < m; ++k) {
    if (header[k] != "x" + std::to_string(k + 1)) {
      throw DataFormatError("header column " + std::to_string(k + 1) + " is '" + header[k] + "', expected x" +
                              std::to_string(k + 1),
                            line_no);
    }
  }

  Dataset data(m);
  std::vector<double> x(m);
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') {
      continue;
    }
    const auto fields = split(content, ',');
    if (fields.size() != m + 2) {
      throw DataFormatError("expected " + std::to_string(m + 2) + " fields, found " + std::to_string(fields.size()),
                            line_no);
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (!parse_double(fields[k], x[k])) {
        throw DataFormatError("non-numeric covariate '" + fields[k] + "'", line_no);
      }
    }
    const std::string& delta = fields[m + 1];
    if (delta != "0" && delta != "1") {
      throw DataFormatError("delta must be 0 or 1, found '" + delta + "'", line_no);
    }
    const bool observed = delta == "1";
    double y = 0.0;
    if (fields[m].empty()) {
      if (observed) {
        throw DataFormatError("empty response with delta = 1", line_no);
      }
    } else if (!parse_double(fields[m], y)) {
      throw DataFormatError("non-numeric response '" + fields[m] + "'", line_no);
    }
    data.add_row(x, y, observed);
  }
  return data;
}

Dataset ingest_dataset(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw DataFormatError("cannot open data file " + path.string());
  }
  return parse_dataset(in);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in)
{
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string content = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (content.empty()) {
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(content.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (cfg.has(key)) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = trim(content.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  return parse(in);
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const
{
  for (const auto& [key, value] : entries_) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const
{
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  double v = 0.0;
  if (!parse_double(it->second, v)) {
    throw ConfigError("config key '" + key + "': '" + it->second + "' is not a number");
  }
  return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  long long v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config key '" + key + "': '" + s + "' is not an integer");
  }
  return v;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  std::vector<double> out;
  for (const auto& field : split(it->second, ',')) {
    double v = 0.0;
    if (!parse_double(field, v)) {
      throw ConfigError("config key '" + key + "': '" + field + "' is not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> KeyValueConfig::get_sizes(const std::string& key,
                                                   const std::vector<std::size_t>& fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  std::vector<std::size_t> out;
  for (const auto& field : split(it->second, ',')) {
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
      throw ConfigError("config key '" + key + "': '" + field + "' is not a nonnegative integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

} // namespace resedf::io
