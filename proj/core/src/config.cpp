#include "coopnet/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace coopnet {

namespace {

std::string trim(const std::string& s) {
  size_t begin = 0;
  size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '-' || c == '.')) {
      return false;
    }
  }
  return true;
}

[[noreturn]] void parse_fail(const std::string& origin, long line,
                             const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

[[noreturn]] void missing_key(const std::string& key) {
  throw std::out_of_range("config key not found: " + key);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw std::runtime_error("config key '" + key + "': cannot parse '" + value +
                           "' as " + expected);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  return from_stream(is, path);
}

Config Config::from_stream(std::istream& is, const std::string& origin) {
  Config cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      parse_fail(origin, line_no, "expected 'key = value', got: " + stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (!valid_key(key)) {
      parse_fail(origin, line_no, "invalid key: '" + key + "'");
    }
    cfg.set(key, value);
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
  } else {
    index_.emplace(key, entries_.size());
    entries_.emplace_back(key, value);
  }
}

void Config::set_real(const std::string& key, double value) {
  set(key, format_double(value));
}

void Config::set_int(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

void Config::set_u64(const std::string& key, uint64_t value) {
  set(key, std::to_string(value));
}

void Config::set_bool(const std::string& key, bool value) {
  set(key, value ? "true" : "false");
}

bool Config::contains(const std::string& key) const {
  return index_.count(key) != 0;
}

std::string Config::get_string(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) missing_key(key);
  return entries_[it->second].second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return contains(key) ? get_string(key) : fallback;
}

double Config::get_real(const std::string& key) const {
  const std::string value = get_string(key);
  const char* first = value.data();
  const char* last = value.data() + value.size();
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(key, value, "a real number");
  return out;
}

double Config::get_real(const std::string& key, double fallback) const {
  return contains(key) ? get_real(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const std::string value = get_string(key);
  const char* first = value.data();
  const char* last = value.data() + value.size();
  long long out = 0;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) bad_value(key, value, "an integer");
  return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

uint64_t Config::get_u64(const std::string& key) const {
  const std::string value = get_string(key);
  const char* first = value.data();
  const char* last = value.data() + value.size();
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    bad_value(key, value, "an unsigned 64-bit integer");
  }
  return out;
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) const {
  return contains(key) ? get_u64(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
  const std::string value = get_string(key);
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "a boolean (true/false/1/0)");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return contains(key) ? get_bool(key) : fallback;
}

void Config::write(std::ostream& os) const {
  for (const auto& [key, value] : entries_) {
    os << key << " = " << value << "\n";
  }
}

std::string Config::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw std::runtime_error("format_double failed");
  }
  return std::string(buf, ptr);
}

}  // namespace coopnet
