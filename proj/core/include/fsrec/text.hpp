#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "fsrec/errors.hpp"

namespace fsrec {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(what, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

inline std::uint64_t parse_uint(std::string_view text, const std::string& what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(what, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace fsrec
