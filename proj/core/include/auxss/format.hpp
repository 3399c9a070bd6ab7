#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace auxss {

// Fixed 17 significant digits; parses back to the identical double.
inline std::string format_real17(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

// Shortest decimal form that round-trips.
inline std::string format_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace auxss
