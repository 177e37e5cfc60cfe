#pragma once

// Numeric text round-trip helpers. 17 significant decimal digits uniquely
// identify every finite double, so fmt17 -> parse17 is bit-exact.

#include <string>

namespace plateau {

std::string fmt17(double v);
double parse17(const std::string& s);

}  // namespace plateau
