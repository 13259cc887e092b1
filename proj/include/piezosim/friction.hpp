#pragma once

// Classical friction force laws. All functions return the force with the
// sign of the velocity, i.e. the value that gets *subtracted* in the
// equations of motion (v * f >= 0 for positive coefficients).

namespace piezosim::friction {

// Default zero-velocity tolerance for the stick test: floating point never
// hits v == 0 exactly, so "at rest" means |v| <= this.
inline constexpr double kZeroVelTol = 1e-9;

struct FrictionParams {
  double f_s = 0.0;  // static friction bound (N)
  double f_c = 0.0;  // Coulomb magnitude (N)
  double f_v = 0.0;  // viscous coefficient (N*s/m)
  double f_d = 0.0;  // drag coefficient (N*s^2/m^2)

  // Throws std::invalid_argument if any coefficient is negative.
  void validate() const;
};

// Force balancing the applied force f_a while the body is at rest, capped at
// f_s; zero once the body moves.
double static_friction(double f_a, double v, double f_s,
                       double v_zero_tol = kZeroVelTol);

// f_c * sgn(v)
double coulomb_friction(double v, double f_c);

// f_v * v
double viscous_friction(double v, double f_v);

// f_d * v * |v|
double drag_friction(double v, double f_d);

}  // namespace piezosim::friction
