#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace quasiblow {

// Shortest round-trip decimal form of a double; "nan"/"inf"/"-inf" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, end};
}

}  // namespace quasiblow
