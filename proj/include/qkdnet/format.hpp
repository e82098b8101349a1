#pragma once

#include <charconv>
#include <string>

namespace qkdnet {

/// Shortest decimal form that parses back to the same double. Keeps config
/// round-trips and report files byte-stable.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace qkdnet
