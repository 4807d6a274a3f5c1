#pragma once

#include <charconv>
#include <string>

namespace mfpt {

/// Shortest-free, locale-independent rendering with 17 significant digits.
inline std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // print negative zero as 0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace mfpt
