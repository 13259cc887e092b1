#pragma once

// Fixed-step simulator of a piezoelectric-motor linear stage: first-order
// velocity dynamics with direction-dependent viscous/Coulomb coefficients,
// a stiction deadzone, an input-side velocity delay, and input saturation.

#include <cstdint>
#include <random>
#include <vector>

namespace piezosim {

struct PlantParams {
  double alpha1_pos = 104.0154;   // viscous coefficient, delayed v > 0 (1/s)
  double alpha1_neg = 117.1441;   // viscous coefficient, delayed v < 0 (1/s)
  double alpha2_pos = 3.1023;     // Coulomb term, v > 0
  double alpha2_neg_base = 5.8216;  // negative-direction Coulomb base
  double alpha2n_rate = 30.0;     // exponential rate in the decreasing-input rule (1/(m/s))
  double alpha3 = 6.0;            // input gain (N/V)
  double alpha_s_cap = 0.6;       // stiction breakaway cap
  double tau = 3.5e-3;            // input-side velocity delay (s)
  double v_cr = 5e-6;             // stick/slip crossover velocity (m/s)

  // Settled negative-direction Coulomb value (held or increasing input).
  double alpha2_neg_settled() const { return alpha2_neg_base + 1.0; }

  void validate() const;  // throws std::invalid_argument

  bool operator==(const PlantParams&) const = default;
};

struct SimConfig {
  double dt = 5e-5;      // integration step (s)
  double duration = 1.0; // total simulated time (s)
  double u_sat = 10.0;   // input saturation (V)

  // Checks 0 < dt <= tau (delay spans >= 1 step), duration > 0, u_sat > 0.
  void validate(double tau) const;

  bool operator==(const SimConfig&) const = default;
};

// Viscous coefficient selected on the sign of the delayed velocity;
// tie-break at zero uses the positive-direction value.
double effective_alpha1(double v_delayed, const PlantParams& p);

// Negative-direction Coulomb term. The velocity-dependent value
// base + (1 - exp(-rate*v)) applies while the input is strictly decreasing
// (u_dot < 0) and is floored at 0; a held or increasing input uses the
// settled value base + 1. A held input must admit a steady state, which the
// velocity-dependent expression does not for sustained negative drive.
double effective_alpha2n(double v, double u_dot, const PlantParams& p);

// Right-hand side of the velocity dynamics (no integration, no clamps).
double acceleration(double v, double v_delayed, double u, double u_dot,
                    double d, const PlantParams& p);

class PlantState {
 public:
  // Start at rest: y = v = 0, delayed velocity reads 0 until t >= tau.
  static PlantState rest(const PlantParams& p, double dt);
  // Start mid-motion with the delay history warmed to v0 (as if v had been
  // constant for at least tau seconds).
  static PlantState moving(double y0, double v0, const PlantParams& p, double dt);

  double y() const { return y_; }
  double v() const { return v_; }
  double t() const { return t_; }
  double dt() const { return dt_; }
  double delayed_velocity() const;

  friend void advance(PlantState& s, double u, double u_dot, double d,
                      const PlantParams& p);

 private:
  PlantState(double y0, double v0, const PlantParams& p, double dt);

  double y_ = 0.0;
  double v_ = 0.0;
  double t_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> hist_;  // ring buffer of past velocities, span = tau
  std::uint64_t step_ = 0;
};

// One fixed step: Heun (trapezoidal) velocity update and trapezoidal
// position update, with the stick arrest and the zero-crossing clamp.
// Throws std::runtime_error on non-finite state.
void advance(PlantState& s, double u, double u_dot, double d,
             const PlantParams& p);

// Value-semantics variant of advance() for one-off stepping in tests.
PlantState step(PlantState s, double u, double u_dot, double d,
                const PlantParams& p);

// Closed-form steady slip velocity under constant input; 0 when the drive
// cannot sustain slip in its own direction.
double steady_state_velocity(double u, const PlantParams& p);

// Open-loop drive signals for simulate().
class InputProfile {
 public:
  enum class Kind { zero, constant, pulse, triangle };

  static InputProfile zero();
  static InputProfile constant(double volts);
  // amplitude for t in [0, width), 0 afterwards
  static InputProfile pulse(double volts, double width_s);
  // periodic triangle 0 -> peak_pos (t=T/4) -> peak_neg (t=3T/4) -> 0
  static InputProfile triangle(double peak_pos, double peak_neg, double period_s);

  double operator()(double t) const;
  Kind kind() const { return kind_; }

 private:
  InputProfile(Kind k, double a, double b, double T) : kind_(k), a_(a), b_(b), T_(T) {}
  Kind kind_ = Kind::zero;
  double a_ = 0.0, b_ = 0.0, T_ = 0.0;
};

struct DisturbanceSpec {
  enum class Kind { none, constant, sinusoid, uniform };
  Kind kind = Kind::none;
  double amplitude = 0.0;   // also the bound D
  double freq_rad_s = 0.0;  // sinusoid only
  double phase_rad = 0.0;   // sinusoid only
  std::uint64_t seed = 0;   // uniform only

  bool operator==(const DisturbanceSpec&) const = default;
};

// Exogenous acceleration-level disturbance with a hard bound |d(t)| <= D.
// The uniform kind draws a fresh sample per call (seeded, deterministic in
// call order), so a Disturbance instance belongs to exactly one run.
class Disturbance {
 public:
  Disturbance() = default;
  explicit Disturbance(const DisturbanceSpec& spec);
  double operator()(double t);
  double bound() const { return spec_.amplitude < 0 ? -spec_.amplitude : spec_.amplitude; }

 private:
  DisturbanceSpec spec_{};
  std::mt19937_64 rng_{0};
};

struct Trace {
  std::vector<double> t, y, v, u;
  std::size_t size() const { return t.size(); }
};

// Dense open-loop run from rest: u is saturated to +-u_sat, u_dot is the
// backward difference of the saturated input, one row per dt.
Trace simulate(const InputProfile& u_profile, const DisturbanceSpec& d,
               const SimConfig& cfg, const PlantParams& p);
Trace simulate(const InputProfile& u_profile, const SimConfig& cfg,
               const PlantParams& p);

}  // namespace piezosim
