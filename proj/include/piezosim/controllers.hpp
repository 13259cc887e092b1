#pragma once

// Sliding-mode controller with partial model compensation (feedforward from
// the inverse stage model along the desired trajectory), plus PI and
// boundary-layer SMC baselines, the sliding surface, the error-derivative
// low-pass, and the reaching-condition margin.

#include <span>
#include <vector>

#include "piezosim/plant.hpp"

namespace piezosim {

struct SlidingSurfaceSpec {
  // lambda[k] weights the k-th error derivative; surface order = size().
  std::vector<double> lambda{1.0, 3.0};

  std::size_t order() const { return lambda.size(); }
  void validate() const;             // all lambda_k > 0, order >= 1
  void validate_normalized() const;  // additionally lambda[0] == 1

  bool operator==(const SlidingSurfaceSpec&) const = default;
};

// s = sum_k lambda_k * e^{ (k) }. Length mismatch rejected.
double sliding_value(std::span<const double> e_derivatives,
                     const SlidingSurfaceSpec& spec);

struct SmcpmcGains {
  double eta = 863.1;          // proportional reaching gain (V per surface unit)
  double beta = 1.3;           // switching gain (V)
  double phi_scale = 1.0 / 3.0;  // gain on the filtered error derivative

  void validate() const;  // eta > 0, beta > 0
  bool operator==(const SmcpmcGains&) const = default;
};

struct ReachingBound {
  double D = 0.0;      // disturbance bound
  double L = 0.0;      // Lipschitz constant of the unmodelled force mismatch
  double rho_c = 0.0;  // partial-model inversion error bound

  void validate() const;  // all >= 0
  bool operator==(const ReachingBound&) const = default;
};

// eta*|s| + beta - (D + L*e_norm + rho_c); positive means the sufficient
// reaching condition holds at this sample.
double reaching_margin(double s, double e_norm, const ReachingBound& bound,
                       const SmcpmcGains& gains);

// y += (dt/time_constant) * (x - y); DC gain 1.
class LowPassFilter {
 public:
  explicit LowPassFilter(double time_constant = 0.1);
  double step(double x, double dt);
  double value() const { return y_; }
  void reset(double y0 = 0.0) { y_ = y0; }
  double time_constant() const { return tc_; }

 private:
  double tc_;
  double y_ = 0.0;
};

// The compensation model is the stage model itself, evaluated along the
// desired trajectory.
struct FeedforwardModel {
  PlantParams params{};
  bool operator==(const FeedforwardModel&) const = default;
};

// Inverse-model feedforward, branching on the desired velocity exactly like
// the plant: slip branches invert the slip dynamics; the stick branch uses
// the stiction force implied by the previous control sample (the law is
// self-referential in u, so the previous commanded value stands in).
double feedforward_u_hat(double v_d, double v_d_delayed, double a_d,
                         double u_prev, double u_dot_prev,
                         const FeedforwardModel& model);

// u = u_hat + phi_scale*e_dot_f + eta*s + beta*sgn(s), s = e + lambda1*e_dot_f.
// Requires a normalized order-2 surface. The caller saturates the output.
double smcpmc_control(double e, double e_dot_filtered, double u_hat,
                      const SmcpmcGains& gains, const SlidingSurfaceSpec& spec);

struct PiGains {
  double kp = 1.9e4;  // V/m
  double ki = 6.6e5;  // V/(m*s)

  void validate() const;  // both >= 0
  bool operator==(const PiGains&) const = default;
};

// Discrete PI with trapezoidal integration and conditional anti-windup:
// while the output saturates, the integrator only accepts increments that
// drive it back toward the linear range. |output| <= u_max always.
class PiController {
 public:
  explicit PiController(const PiGains& gains = {}, double u_max = 10.0);
  double update(double e, double dt);
  void reset();
  double integral() const { return integral_; }
  void set_integral(double value) { integral_ = value; }

 private:
  PiGains gains_;
  double u_max_;
  double integral_ = 0.0;
  double e_prev_ = 0.0;
  bool have_prev_ = false;
};

struct BoundarySmcGains {
  double eta = 863.1;
  double beta = 1.3;
  double boundary_width = 1e-3;  // surface units; sgn smoothed inside the band

  void validate() const;  // eta > 0, beta > 0, boundary_width > 0
  bool operator==(const BoundarySmcGains&) const = default;
};

// u = eta*s + beta*sat(s/boundary_width); no model feedforward.
double boundary_smc_control(double e, double e_dot, const BoundarySmcGains& gains,
                            const SlidingSurfaceSpec& spec);

}  // namespace piezosim
