#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace coopnet {

/// Flat "key = value" configuration: one pair per line, '#' comments and
/// blank lines ignored. Keys keep their first-insertion order so that config
/// echoes are stable; setting an existing key overwrites in place.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_stream(std::istream& is, const std::string& origin);

  void set(const std::string& key, const std::string& value);
  void set_real(const std::string& key, double value);
  void set_int(const std::string& key, long long value);
  void set_u64(const std::string& key, uint64_t value);
  void set_bool(const std::string& key, bool value);

  bool contains(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_real(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  uint64_t get_u64(const std::string& key) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  void write(std::ostream& os) const;
  std::string to_string() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, size_t> index_;
};

/// Shortest round-trip decimal form of a double ("17", "0.3", "1e-09", ...).
std::string format_double(double value);

}  // namespace coopnet
