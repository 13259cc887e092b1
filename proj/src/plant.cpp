#include "piezosim/plant.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "piezosim/numeric.hpp"

namespace piezosim {

void PlantParams::validate() const {
  if (!(alpha1_pos > 0.0) || !(alpha1_neg > 0.0)) {
    throw std::invalid_argument("alpha1 coefficients must be > 0");
  }
  if (!(alpha3 > 0.0)) throw std::invalid_argument("alpha3 must be > 0");
  if (!(alpha_s_cap > 0.0)) throw std::invalid_argument("alpha_s_cap must be > 0");
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be >= 0");
  if (!(v_cr > 0.0)) throw std::invalid_argument("v_cr must be > 0");
}

void SimConfig::validate(double tau) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (tau > 0.0 && dt > tau) {
    throw std::invalid_argument("dt must not exceed the plant delay tau");
  }
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (!(u_sat > 0.0)) throw std::invalid_argument("u_sat must be > 0");
}

double effective_alpha1(double v_delayed, const PlantParams& p) {
  return v_delayed < 0.0 ? p.alpha1_neg : p.alpha1_pos;
}

double effective_alpha2n(double v, double u_dot, const PlantParams& p) {
  if (u_dot < 0.0) {
    const double value = p.alpha2_neg_base + (1.0 - std::exp(-p.alpha2n_rate * v));
    return value > 0.0 ? value : 0.0;
  }
  return p.alpha2_neg_settled();
}

namespace {

double stick_net_force(double v_delayed, double u, double d, const PlantParams& p) {
  return p.alpha3 * u - effective_alpha1(v_delayed, p) * v_delayed + d;
}

}  // namespace

double acceleration(double v, double v_delayed, double u, double u_dot,
                    double d, const PlantParams& p) {
  const double a1 = effective_alpha1(v_delayed, p);
  if (v > p.v_cr) {
    return -a1 * v_delayed - p.alpha2_pos + p.alpha3 * u + d;
  }
  if (v < -p.v_cr) {
    return -a1 * v_delayed + effective_alpha2n(v, u_dot, p) + p.alpha3 * u + d;
  }
  const double net = stick_net_force(v_delayed, u, d, p);
  if (std::abs(net) < p.alpha_s_cap) return 0.0;  // stiction cancels the drive
  return net - p.alpha_s_cap * sgn(net);
}

PlantState::PlantState(double y0, double v0, const PlantParams& p, double dt)
    : y_(y0), v_(v0), dt_(dt) {
  p.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  const auto delay_steps = static_cast<std::size_t>(std::llround(p.tau / dt));
  hist_.assign(delay_steps, v0);
}

PlantState PlantState::rest(const PlantParams& p, double dt) {
  return PlantState(0.0, 0.0, p, dt);
}

PlantState PlantState::moving(double y0, double v0, const PlantParams& p, double dt) {
  return PlantState(y0, v0, p, dt);
}

double PlantState::delayed_velocity() const {
  if (hist_.empty()) return v_;
  return hist_[step_ % hist_.size()];
}

void advance(PlantState& s, double u, double u_dot, double d,
             const PlantParams& p) {
  if (!std::isfinite(u) || !std::isfinite(d)) {
    throw std::runtime_error("non-finite input at t = " + std::to_string(s.t_));
  }
  const double v_delayed = s.delayed_velocity();

  double v_new;
  if (std::abs(s.v_) <= p.v_cr &&
      std::abs(stick_net_force(v_delayed, u, d, p)) < p.alpha_s_cap) {
    v_new = 0.0;  // stiction holds: arrest exactly instead of coasting
  } else {
    // Heun step. The right-hand side depends on the current velocity only
    // through branch selection and the exponential Coulomb term; the delayed
    // velocity at the step end is already on record, so the trapezoidal
    // average costs one extra evaluation and buys second-order accuracy
    // between branch events.
    const double a0 = acceleration(s.v_, v_delayed, u, u_dot, d, p);
    const double v_pred = s.v_ + a0 * s.dt_;
    const double v_delayed_end =
        s.hist_.empty() ? v_pred
        : s.hist_.size() == 1
            ? s.v_
            : s.hist_[(s.step_ + 1) % s.hist_.size()];
    const double a1 = acceleration(v_pred, v_delayed_end, u, u_dot, d, p);
    v_new = s.v_ + 0.5 * s.dt_ * (a0 + a1);
    if (v_new * s.v_ < 0.0 &&
        std::abs(stick_net_force(v_delayed, u, d, p)) < p.alpha_s_cap) {
      v_new = 0.0;  // crossed zero within the step and the stick branch holds
    }
  }

  if (!s.hist_.empty()) {
    s.hist_[s.step_ % s.hist_.size()] = s.v_;
  }
  const double y_inc = 0.5 * (s.v_ + v_new) * s.dt_;
  s.v_ = v_new;
  s.y_ += y_inc;
  s.t_ += s.dt_;
  ++s.step_;

  if (!std::isfinite(s.v_) || !std::isfinite(s.y_)) {
    throw std::runtime_error("non-finite state at t = " + std::to_string(s.t_));
  }
}

PlantState step(PlantState s, double u, double u_dot, double d,
                const PlantParams& p) {
  advance(s, u, u_dot, d, p);
  return s;
}

double steady_state_velocity(double u, const PlantParams& p) {
  if (u > 0.0) {
    const double v = (p.alpha3 * u - p.alpha2_pos) / p.alpha1_pos;
    return v > 0.0 ? v : 0.0;
  }
  if (u < 0.0) {
    const double v = (p.alpha3 * u + p.alpha2_neg_settled()) / p.alpha1_neg;
    return v < 0.0 ? v : 0.0;
  }
  return 0.0;
}

InputProfile InputProfile::zero() { return {Kind::zero, 0.0, 0.0, 0.0}; }

InputProfile InputProfile::constant(double volts) {
  return {Kind::constant, volts, 0.0, 0.0};
}

InputProfile InputProfile::pulse(double volts, double width_s) {
  if (!(width_s > 0.0)) throw std::invalid_argument("pulse width must be > 0");
  return {Kind::pulse, volts, 0.0, width_s};
}

InputProfile InputProfile::triangle(double peak_pos, double peak_neg,
                                    double period_s) {
  if (!(period_s > 0.0)) throw std::invalid_argument("triangle period must be > 0");
  return {Kind::triangle, peak_pos, peak_neg, period_s};
}

double InputProfile::operator()(double t) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return a_;
    case Kind::pulse:
      return (t >= 0.0 && t < T_) ? a_ : 0.0;
    case Kind::triangle: {
      const double x = std::fmod(std::fmod(t, T_) + T_, T_) / T_;  // [0,1)
      if (x < 0.25) return a_ * (x / 0.25);
      if (x < 0.75) return a_ + (b_ - a_) * ((x - 0.25) / 0.5);
      return b_ * (1.0 - (x - 0.75) / 0.25);
    }
  }
  return 0.0;
}

Disturbance::Disturbance(const DisturbanceSpec& spec)
    : spec_(spec), rng_(spec.seed) {
  if (spec.amplitude < 0.0) {
    throw std::invalid_argument("disturbance amplitude must be >= 0");
  }
}

double Disturbance::operator()(double t) {
  switch (spec_.kind) {
    case DisturbanceSpec::Kind::none:
      return 0.0;
    case DisturbanceSpec::Kind::constant:
      return spec_.amplitude;
    case DisturbanceSpec::Kind::sinusoid:
      return spec_.amplitude * std::sin(spec_.freq_rad_s * t + spec_.phase_rad);
    case DisturbanceSpec::Kind::uniform: {
      std::uniform_real_distribution<double> dist(-spec_.amplitude, spec_.amplitude);
      return dist(rng_);
    }
  }
  return 0.0;
}

Trace simulate(const InputProfile& u_profile, const DisturbanceSpec& d,
               const SimConfig& cfg, const PlantParams& p) {
  p.validate();
  cfg.validate(p.tau);
  Disturbance dist(d);

  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  Trace trace;
  trace.t.reserve(n_steps + 1);
  trace.y.reserve(n_steps + 1);
  trace.v.reserve(n_steps + 1);
  trace.u.reserve(n_steps + 1);

  PlantState state = PlantState::rest(p, cfg.dt);
  double u_prev = 0.0;
  for (std::size_t n = 0; n <= n_steps; ++n) {
    const double t = static_cast<double>(n) * cfg.dt;
    const double u = saturate(u_profile(t), cfg.u_sat);
    trace.t.push_back(t);
    trace.y.push_back(state.y());
    trace.v.push_back(state.v());
    trace.u.push_back(u);
    if (n == n_steps) break;
    const double u_dot = (n == 0) ? 0.0 : (u - u_prev) / cfg.dt;
    advance(state, u, u_dot, dist(t), p);
    u_prev = u;
  }
  return trace;
}

Trace simulate(const InputProfile& u_profile, const SimConfig& cfg,
               const PlantParams& p) {
  return simulate(u_profile, DisturbanceSpec{}, cfg, p);
}

}  // namespace piezosim
