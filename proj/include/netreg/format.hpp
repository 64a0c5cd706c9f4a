#pragma once

#include <cstdio>
#include <string>

namespace netreg {

/// Formats a double with 17 significant digits (%.17g), enough to round-trip
/// IEEE754 binary64 exactly. All text output of this project goes through
/// this function so that identical runs produce byte-identical files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace netreg
