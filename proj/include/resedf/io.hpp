#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "resedf/dataset.hpp"

namespace resedf::io {

//! Invalid or unknown configuration entry.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Reads `x1,...,xm,y,delta` CSV. An empty y is allowed (and stored as 0)
//! only when delta = 0. Errors carry the 1-based line number.
Dataset parse_dataset(std::istream& in);
Dataset ingest_dataset(const std::filesystem::path& path);

//! Flat `key = value` file; '#' starts a comment, blank lines are ignored.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  //! Throws ConfigError naming the first key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const;

private:
  std::map<std::string, std::string> entries_;
};

//! 6 significant digits, `%g` style.
std::string format_number(double v);

std::vector<std::string> split(const std::string& line, char delimiter);
std::string trim(const std::string& s);
bool parse_double(const std::string& text, double& out);

} // namespace resedf::io
