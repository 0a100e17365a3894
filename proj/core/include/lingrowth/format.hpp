#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace lingrowth {

/// Fixed 12-significant-digit rendering used by every text output.
inline std::string format_real(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// x rounded to the value its 12-digit rendering parses back to.
inline double round_to_12_digits(double x) {
  if (!std::isfinite(x)) {
    return x;
  }
  return std::stod(format_real(x));
}

} // namespace lingrowth
