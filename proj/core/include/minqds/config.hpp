#pragma once

#include <map>
#include <string>
#include <vector>

namespace minqds {

/// Line-based key-tree configuration:
///
///   # comment
///   scenario = transport_jump
///   grid.n_points = 128
///   lambda = 0.5 1 2          # lists are whitespace separated
///
/// Keys are dotted paths; values are numbers, booleans, words or lists.
/// Parsing and typed access report the offending line on error, and keys the
/// consumer never reads are rejected, so configs cannot silently drift.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<config>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Inject or replace a value (CLI flags and environment overrides).
  void set(const std::string& key, const std::string& value);

  /// Throws listing every present-but-never-read key with its line number.
  void require_fully_consumed() const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool consumed = false;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  const Entry* find(const std::string& key) const;

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

}  // namespace minqds
