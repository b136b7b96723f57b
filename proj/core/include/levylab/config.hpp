#ifndef LEVYLAB_CONFIG_HPP_
#define LEVYLAB_CONFIG_HPP_

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "levylab/catalog.hpp"

namespace levylab {

// Flat `key = value` text with `[section]` headers. Keys are addressed as
// "section.key"; `#` and `;` start comments. Every lookup marks the key as
// consumed so that misspelled keys can be reported with their line.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_string(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma- or whitespace-separated numbers.
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key,
                               std::vector<double> fallback) const;
  // `key = family` plus its `key.param = value` entries.
  FamilySpec get_family(const std::string& key,
                        const std::string& fallback_family) const;

  void set(const std::string& key, const std::string& value);
  int line_of(const std::string& key) const;
  // Throws ConfigError naming the first key nobody asked for.
  void require_all_consumed() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* find(const std::string& key) const;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> consumed_;
};

}  // namespace levylab

#endif  // LEVYLAB_CONFIG_HPP_
