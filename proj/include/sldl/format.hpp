#pragma once

#include <string>

namespace sldl {

// 17 significant digits ("%.17g"): every double round-trips and
// report bytes are reproducible.
std::string format_number(double v);

}  // namespace sldl
