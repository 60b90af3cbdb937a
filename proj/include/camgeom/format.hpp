#pragma once

#include <charconv>
#include <string>

namespace camgeom {

// Shortest round-trip decimal form, used for CSV output.
inline std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace camgeom
