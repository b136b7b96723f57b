#include "levylab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(const std::string& text) {
  // strtod accepts "inf", "1e-3" and friends; reject trailing garbage.
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return std::nullopt;
  return v;
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ConfigError(line, "", "malformed section header");
      }
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "", "expected 'key = value'");
    }
    const std::string name = trim(text.substr(0, eq));
    if (name.empty()) throw ConfigError(line, "", "empty key");
    const std::string key = section.empty() ? name : section + "." + name;
    if (cfg.entries_.count(key)) {
      throw ConfigError(line, key, "duplicate key (first on line " +
                                       std::to_string(cfg.entries_[key].line) + ")");
    }
    cfg.entries_[key] = {trim(text.substr(eq + 1)), line};
  }
  return cfg;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file " + path.string());
  return parse(in);
}

const Config::Entry* Config::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

int Config::line_of(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::string Config::get_string(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(0, key, "missing required key");
  return e->value;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(0, key, "missing required key");
  auto v = to_double(e->value);
  if (!v) throw ConfigError(e->line, key, "not a number: '" + e->value + "'");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(0, key, "missing required key");
  long v = 0;
  const char* begin = e->value.data();
  const char* end = begin + e->value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(e->line, key, "not an integer: '" + e->value + "'");
  }
  return v;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(e->line, key, "not a boolean: '" + e->value + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(0, key, "missing required key");
  std::string text = e->value;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    auto v = to_double(token);
    if (!v) throw ConfigError(e->line, key, "not a number: '" + token + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> Config::get_list(const std::string& key,
                                     std::vector<double> fallback) const {
  return has(key) ? get_list(key) : fallback;
}

FamilySpec Config::get_family(const std::string& key,
                              const std::string& fallback_family) const {
  FamilySpec spec;
  spec.family = get_string(key, fallback_family);
  const std::string prefix = key + ".";
  for (auto it = entries_.lower_bound(prefix);
       it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
       ++it) {
    spec.params[it->first.substr(prefix.size())] = get_double(it->first);
  }
  return spec;
}

void Config::set(const std::string& key, const std::string& value) {
  auto& e = entries_[key];
  e.value = value;
}

void Config::require_all_consumed() const {
  const Entry* first = nullptr;
  std::string first_key;
  for (const auto& [key, entry] : entries_) {
    if (consumed_.count(key)) continue;
    if (!first || entry.line < first->line) {
      first = &entry;
      first_key = key;
    }
  }
  if (first) throw ConfigError(first->line, first_key, "unknown key");
}

}  // namespace levylab
