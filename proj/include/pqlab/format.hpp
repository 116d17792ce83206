#pragma once

#include <cstdio>
#include <string>

namespace pqlab {

inline std::string num(double v, int precision = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

}  // namespace pqlab
