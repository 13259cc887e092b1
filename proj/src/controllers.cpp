#include "piezosim/controllers.hpp"

#include <cmath>
#include <stdexcept>

#include "piezosim/numeric.hpp"

namespace piezosim {

void SlidingSurfaceSpec::validate() const {
  if (lambda.empty()) throw std::invalid_argument("sliding surface needs >= 1 coefficient");
  for (double l : lambda) {
    if (!(l > 0.0)) throw std::invalid_argument("sliding surface coefficients must be > 0");
  }
}

void SlidingSurfaceSpec::validate_normalized() const {
  validate();
  if (lambda.front() != 1.0) {
    throw std::invalid_argument("control law expects a normalized surface (lambda0 = 1)");
  }
}

double sliding_value(std::span<const double> e_derivatives,
                     const SlidingSurfaceSpec& spec) {
  spec.validate();
  if (e_derivatives.size() != spec.lambda.size()) {
    throw std::invalid_argument("error-derivative list length must equal surface order");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < spec.lambda.size(); ++k) {
    s += spec.lambda[k] * e_derivatives[k];
  }
  return s;
}

void SmcpmcGains::validate() const {
  if (!(eta > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("eta and beta must be > 0");
  }
}

void ReachingBound::validate() const {
  if (D < 0.0 || L < 0.0 || rho_c < 0.0) {
    throw std::invalid_argument("reaching bound terms must be >= 0");
  }
}

double reaching_margin(double s, double e_norm, const ReachingBound& bound,
                       const SmcpmcGains& gains) {
  return gains.eta * std::abs(s) + gains.beta -
         (bound.D + bound.L * e_norm + bound.rho_c);
}

LowPassFilter::LowPassFilter(double time_constant) : tc_(time_constant) {
  if (!(tc_ > 0.0)) throw std::invalid_argument("filter time constant must be > 0");
}

double LowPassFilter::step(double x, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("filter step needs dt > 0");
  y_ += (dt / tc_) * (x - y_);
  return y_;
}

double feedforward_u_hat(double v_d, double v_d_delayed, double a_d,
                         double u_prev, double u_dot_prev,
                         const FeedforwardModel& model) {
  const PlantParams& p = model.params;
  const double a1 = effective_alpha1(v_d_delayed, p);
  if (v_d > p.v_cr) {
    return (a_d + a1 * v_d_delayed + p.alpha2_pos) / p.alpha3;
  }
  if (v_d < -p.v_cr) {
    return (a_d + a1 * v_d_delayed - effective_alpha2n(v_d, u_dot_prev, p)) / p.alpha3;
  }
  // Stick band: the stiction magnitude implied by the previous command,
  // capped at the breakaway value, signed with the desired direction.
  const double net = p.alpha3 * u_prev - a1 * v_d_delayed;
  const double alpha_s = std::min(std::abs(net), p.alpha_s_cap);
  return (a_d + a1 * v_d_delayed + alpha_s * sgn(v_d)) / p.alpha3;
}

double smcpmc_control(double e, double e_dot_filtered, double u_hat,
                      const SmcpmcGains& gains, const SlidingSurfaceSpec& spec) {
  gains.validate();
  spec.validate_normalized();
  if (spec.order() != 2) {
    throw std::invalid_argument("smcpmc_control is the order-2 surface instance");
  }
  const double derivs[2] = {e, e_dot_filtered};
  const double s = sliding_value(derivs, spec);
  return u_hat + gains.phi_scale * e_dot_filtered + gains.eta * s +
         gains.beta * sgn(s);
}

void PiGains::validate() const {
  if (kp < 0.0 || ki < 0.0) throw std::invalid_argument("PI gains must be >= 0");
}

PiController::PiController(const PiGains& gains, double u_max)
    : gains_(gains), u_max_(u_max) {
  gains_.validate();
  if (!(u_max_ > 0.0)) throw std::invalid_argument("PI output limit must be > 0");
}

double PiController::update(double e, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("PI update needs dt > 0");
  if (!have_prev_) {
    e_prev_ = e;
    have_prev_ = true;
  }
  const double inc = 0.5 * (e + e_prev_) * dt;
  e_prev_ = e;

  const double u_trial = gains_.kp * e + gains_.ki * (integral_ + inc);
  if (std::abs(u_trial) <= u_max_) {
    integral_ += inc;
    return u_trial;
  }
  // Saturated: integrate only when the increment unwinds the overshoot.
  if (inc * u_trial < 0.0) integral_ += inc;
  return saturate(gains_.kp * e + gains_.ki * integral_, u_max_);
}

void PiController::reset() {
  integral_ = 0.0;
  e_prev_ = 0.0;
  have_prev_ = false;
}

void BoundarySmcGains::validate() const {
  if (!(eta > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("eta and beta must be > 0");
  }
  if (!(boundary_width > 0.0)) {
    throw std::invalid_argument("boundary width must be > 0");
  }
}

double boundary_smc_control(double e, double e_dot, const BoundarySmcGains& gains,
                            const SlidingSurfaceSpec& spec) {
  gains.validate();
  if (spec.order() != 2) {
    throw std::invalid_argument("boundary_smc_control uses an order-2 surface");
  }
  const double derivs[2] = {e, e_dot};
  const double s = sliding_value(derivs, spec);
  return gains.eta * s + gains.beta * unit_sat(s / gains.boundary_width);
}

}  // namespace piezosim
