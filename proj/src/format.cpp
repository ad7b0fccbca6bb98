#include "fpl/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace fpl {

std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed6(double v) {
  if (std::isinf(v))
    return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

} // namespace fpl
