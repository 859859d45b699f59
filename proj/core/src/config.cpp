#include "minqds/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace minqds {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_')) {
      return false;
    }
  }
  return true;
}

double parse_number(const std::string& tok, const std::string& context) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw std::runtime_error(context + ": '" + tok + "' is not a number");
  }
  return v;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": invalid key '" + key + "'");
    }
    if (value.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": empty value for '" + key + "'");
    }
    if (cfg.entries_.count(key)) {
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = Entry{value, lineno, false};
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str(), path);
}

const Config::Entry* Config::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.consumed = true;
  return &it->second;
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

void Config::fail(const std::string& key, const std::string& what) const {
  const auto it = entries_.find(key);
  const std::string loc =
      it == entries_.end() ? origin_ : origin_ + ":" + std::to_string(it->second.line);
  throw std::runtime_error(loc + ": key '" + key + "' " + what);
}

std::string Config::get_string(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) fail(key, "is required");
  return e->value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) fail(key, "is required");
  try {
    return parse_number(e->value, "");
  } catch (const std::exception&) {
    fail(key, "must be a number, got '" + e->value + "'");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return find(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
  const double v = get_double(key);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v) fail(key, "must be an integer");
  return l;
}

long Config::get_long(const std::string& key, long fallback) const {
  return find(key) ? get_long(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  fail(key, "must be a boolean (true/false)");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) fail(key, "is required");
  std::vector<double> out;
  for (const auto& tok : split_ws(e->value)) {
    try {
      out.push_back(parse_number(tok, ""));
    } catch (const std::exception&) {
      fail(key, "list element '" + tok + "' is not a number");
    }
  }
  if (out.empty()) fail(key, "must contain at least one number");
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) const {
  return find(key) ? get_double_list(key) : fallback;
}

std::vector<std::string> Config::get_string_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) fail(key, "is required");
  return split_ws(e->value);
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0, false};
}

void Config::require_fully_consumed() const {
  std::string bad;
  for (const auto& [key, entry] : entries_) {
    if (!entry.consumed) {
      if (!bad.empty()) bad += ", ";
      bad += "'" + key + "' (line " + std::to_string(entry.line) + ")";
    }
  }
  if (!bad.empty()) {
    throw std::runtime_error(origin_ + ": unknown keys: " + bad);
  }
}

}  // namespace minqds
