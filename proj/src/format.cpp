#include "sldl/format.hpp"

#include <cstdio>

namespace sldl {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sldl
