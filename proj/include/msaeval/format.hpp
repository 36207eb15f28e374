#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace msaeval {

// Fixed-point rendering with `decimals` digits after the point.
inline std::string fixed(double value, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  // "-0.00" reads as a nonzero delta; normalise it.
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

// A fraction in [0,1] rendered as a percentage, two decimals, no sign.
inline std::string percent(double fraction) { return fixed(100.0 * fraction, 2); }

inline std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace msaeval
