#pragma once

#include <algorithm>

namespace piezosim {

// Signum with sgn(0) = 0; every switching law in the library shares this
// convention so the stick/slip branches stay continuous at zero.
inline double sgn(double x) {
  return static_cast<double>(x > 0.0) - static_cast<double>(x < 0.0);
}

// Symmetric hard limit, used for actuator saturation.
inline double saturate(double x, double limit) {
  return std::clamp(x, -limit, limit);
}

// Unit saturation, the smoothed switch of the boundary-layer controller.
inline double unit_sat(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace piezosim
