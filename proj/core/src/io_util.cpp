#include "plateau/io_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace plateau {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse17(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("not a number: '" + s + "'");
  return v;
}

}  // namespace plateau
