#pragma once

#include <string>

namespace intersafe {

/// Fixed-point rendering with `decimals` places; never emits a negative zero.
std::string fixed(double v, int decimals);

}  // namespace intersafe
