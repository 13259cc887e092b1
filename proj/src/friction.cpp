#include "piezosim/friction.hpp"

#include <cmath>
#include <stdexcept>

#include "piezosim/numeric.hpp"

namespace piezosim::friction {

void FrictionParams::validate() const {
  if (f_s < 0.0 || f_c < 0.0 || f_v < 0.0 || f_d < 0.0) {
    throw std::invalid_argument("friction coefficients must be >= 0");
  }
}

double static_friction(double f_a, double v, double f_s, double v_zero_tol) {
  if (f_s < 0.0) throw std::invalid_argument("static friction bound must be >= 0");
  if (std::abs(v) > v_zero_tol) return 0.0;
  if (std::abs(f_a) < f_s) return f_a;
  return f_s * sgn(f_a);
}

double coulomb_friction(double v, double f_c) {
  if (f_c < 0.0) throw std::invalid_argument("Coulomb magnitude must be >= 0");
  return f_c * sgn(v);
}

double viscous_friction(double v, double f_v) {
  if (f_v < 0.0) throw std::invalid_argument("viscous coefficient must be >= 0");
  return f_v * v;
}

double drag_friction(double v, double f_d) {
  if (f_d < 0.0) throw std::invalid_argument("drag coefficient must be >= 0");
  return f_d * v * std::abs(v);
}

}  // namespace piezosim::friction
