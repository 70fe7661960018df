#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace linksched {

/// Raised by the low-level text parsers; callers wrap it into ConfigError or
/// DataError with location context.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// 17 significant digits: enough for a bit-exact double round-trip.
inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(delim, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

inline double parse_double(const std::string& s) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("trailing characters in number '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
}

inline long long parse_int(const std::string& s) {
  try {
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw ParseError("trailing characters in integer '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("not an integer: '" + s + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& s) {
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw ParseError("trailing characters in integer '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("not an unsigned integer: '" + s + "'");
  }
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError("not a boolean: '" + s + "' (expected true/false)");
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace linksched
