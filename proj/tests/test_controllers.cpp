#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "piezosim/controllers.hpp"

using namespace piezosim;

namespace {
const SlidingSurfaceSpec kSurface{};  // s = e + 3*e_dot
const SmcpmcGains kGains{};           // eta 863.1, beta 1.3, phi 1/3
}

TEST_CASE("sliding value is the weighted error-derivative sum") {
  CHECK(sliding_value(std::array{0.0, 0.0}, kSurface) == 0.0);
  CHECK(sliding_value(std::array{0.001, -0.0002}, kSurface) ==
        doctest::Approx(0.0004).epsilon(1e-12));
  SlidingSurfaceSpec order3;
  order3.lambda = {2.0, 1.0, 1.0};
  CHECK(sliding_value(std::array{1.0, 1.0, 1.0}, order3) ==
        doctest::Approx(4.0));
}

TEST_CASE("sliding value rejects mismatched input length") {
  CHECK_THROWS_AS(sliding_value(std::array{1.0, 2.0, 3.0}, kSurface),
                  std::invalid_argument);
  SlidingSurfaceSpec bad;
  bad.lambda = {1.0, -3.0};
  CHECK_THROWS_AS(sliding_value(std::array{0.0, 0.0}, bad),
                  std::invalid_argument);
  bad.lambda.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("surface normalization check") {
  SlidingSurfaceSpec unnormalized;
  unnormalized.lambda = {2.0, 3.0};
  CHECK_NOTHROW(unnormalized.validate());
  CHECK_THROWS_AS(unnormalized.validate_normalized(), std::invalid_argument);
  CHECK_NOTHROW(kSurface.validate_normalized());
}

TEST_CASE("feedforward inverts the slip model along the desired trajectory") {
  const FeedforwardModel model{};
  const double v_peak = 0.031415926535897934;
  // Positive slip at the reference's peak slope.
  CHECK(feedforward_u_hat(v_peak, v_peak, 0.0, 0.0, 0.0, model) ==
        doctest::Approx(1.061673360833673).epsilon(1e-9));
  // Negative slip with rising input: settled Coulomb value.
  CHECK(feedforward_u_hat(-v_peak, -v_peak, 0.0, 0.0, 1.0, model) ==
        doctest::Approx((-117.1441 * v_peak - 6.8216) / 6.0).epsilon(1e-9));
  // Acceleration term passes straight through the inverse gain.
  CHECK(feedforward_u_hat(v_peak, v_peak, 0.12, 0.0, 0.0, model) ==
        doctest::Approx(1.061673360833673 + 0.02).epsilon(1e-9));
}

TEST_CASE("feedforward stick branch is capped by the breakaway limit") {
  const FeedforwardModel model{};
  // |v_d| <= v_cr: the stiction force implied by the previous command,
  // capped at alpha_s_cap, divided by the input gain -> magnitude <= 0.1.
  CHECK(feedforward_u_hat(1e-6, 0.0, 0.0, 5.0, 0.0, model) ==
        doctest::Approx(0.1).epsilon(1e-12));
  CHECK(feedforward_u_hat(-1e-6, 0.0, 0.0, 5.0, 0.0, model) ==
        doctest::Approx(-0.1).epsilon(1e-12));
  // Below the cap the implied force is used as-is: 6*0.05 = 0.3 -> 0.05 V.
  CHECK(feedforward_u_hat(1e-6, 0.0, 0.0, 0.05, 0.0, model) ==
        doctest::Approx(0.05).epsilon(1e-12));
  // Exactly zero desired velocity contributes nothing.
  CHECK(feedforward_u_hat(0.0, 0.0, 0.0, 5.0, 0.0, model) == 0.0);
}

TEST_CASE("sliding mode law with model compensation: point values") {
  CHECK(smcpmc_control(0.0, 0.0, 0.0, kGains, kSurface) == 0.0);
  // s = 1e-4 + 3e-4 = 4e-4; u = u_hat + (1/3)e_dot + 863.1 s + 1.3 sgn(s).
  CHECK(smcpmc_control(1e-4, 1e-4, 1.0617, kGains, kSurface) ==
        doctest::Approx(2.7069733333333334).epsilon(1e-9));
  CHECK(smcpmc_control(-1e-4, 0.0, 0.0, kGains, kSurface) ==
        doctest::Approx(-1.38631).epsilon(1e-9));
}

TEST_CASE("sliding mode law requires the normalized order-2 surface") {
  SlidingSurfaceSpec unnormalized;
  unnormalized.lambda = {2.0, 3.0};
  CHECK_THROWS_AS(smcpmc_control(0.0, 0.0, 0.0, kGains, unnormalized),
                  std::invalid_argument);
  SlidingSurfaceSpec order3;
  order3.lambda = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(smcpmc_control(0.0, 0.0, 0.0, kGains, order3),
                  std::invalid_argument);
}

TEST_CASE("feedback part is odd over randomized inputs") {
  // With zero feedforward the law is an odd function of (e, e_dot).
  std::mt19937_64 rng(20240821);
  std::uniform_real_distribution<double> err(-0.01, 0.01);
  for (int i = 0; i < 2000; ++i) {
    const double e = err(rng);
    const double ed = err(rng);
    CHECK(smcpmc_control(-e, -ed, 0.0, kGains, kSurface) ==
          -smcpmc_control(e, ed, 0.0, kGains, kSurface));
  }
}

TEST_CASE("reaching margin point values") {
  ReachingBound none{0.0, 0.0, 0.0};
  CHECK(reaching_margin(0.0, 0.0, none, kGains) == doctest::Approx(1.3));
  ReachingBound bound{1.0, 100.0, 0.5};
  CHECK(reaching_margin(1e-3, 1e-3, bound, kGains) ==
        doctest::Approx(0.5631).epsilon(1e-12));
  // Switching gain below the disturbance bound: negative margin at s = 0.
  SmcpmcGains weak = kGains;
  weak.beta = 0.5;
  CHECK(reaching_margin(0.0, 0.0, bound, weak) < 0.0);

  CHECK_THROWS_AS((ReachingBound{-1.0, 0.0, 0.0}.validate()),
                  std::invalid_argument);
  CHECK_NOTHROW(bound.validate());
}

TEST_CASE("low-pass filter: step response and validation") {
  CHECK_THROWS_AS(LowPassFilter{0.0}, std::invalid_argument);
  CHECK_THROWS_AS(LowPassFilter{-0.1}, std::invalid_argument);

  LowPassFilter f(0.1);
  CHECK(f.step(0.0, 1e-3) == 0.0);
  f.reset();
  CHECK(f.step(1.0, 1e-3) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(f.step(1.0, 0.0), std::invalid_argument);

  // Settles to the input within 1% after 5 time constants.
  f.reset();
  for (int i = 0; i < 500; ++i) f.step(2.0, 1e-3);
  CHECK(f.value() == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("low-pass filter: unit DC gain over randomized inputs") {
  std::mt19937_64 rng(20240822);
  std::uniform_real_distribution<double> tc_dist(1e-3, 1.0);
  std::uniform_real_distribution<double> ratio(1e-3, 0.5);
  std::uniform_real_distribution<double> level(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double tc = tc_dist(rng);
    const double dt = tc * ratio(rng);
    double c = level(rng);
    if (std::abs(c) < 1e-3) c = 1e-3;
    LowPassFilter f(tc);
    double t = 0.0;
    while (t < 8.0 * tc) {
      f.step(c, dt);
      t += dt;
    }
    // Asymptotic gain 1 within 1e-3.
    CHECK(f.value() == doctest::Approx(c).epsilon(1e-3));
  }
}

TEST_CASE("PI controller: point values") {
  PiController zero;
  for (int i = 0; i < 10; ++i) CHECK(zero.update(0.0, 1e-3) == 0.0);

  PiController pi;
  pi.set_integral(1e-5);
  // kp*1e-4 + ki*1e-5 = 1.9 + 6.6 = 8.5 (the tiny trapezoid increment over
  // dt = 1e-9 shifts it by only 6.6e-8).
  CHECK(pi.update(1e-4, 1e-9) == doctest::Approx(8.5).epsilon(1e-6));

  PiController clamp;
  CHECK(clamp.update(1e-2, 1e-3) == 10.0);  // raw kp*e = 190 V
  PiController clamp_neg;
  CHECK(clamp_neg.update(-1e-2, 1e-3) == -10.0);

  CHECK_THROWS_AS(PiController{}.update(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((PiGains{-1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((PiGains{}.validate()));

  PiController r;
  r.update(1e-3, 1.0);
  r.reset();
  CHECK(r.integral() == 0.0);
  CHECK(r.update(0.0, 1e-3) == 0.0);
}

TEST_CASE("PI controller: output clamp holds for any input sequence") {
  std::mt19937_64 rng(20240823);
  std::uniform_real_distribution<double> err(-0.05, 0.05);
  std::uniform_real_distribution<double> dts(1e-5, 1e-2);
  for (int seq = 0; seq < 1000; ++seq) {
    PiController pi;
    const double dt = dts(rng);
    for (int k = 0; k < 60; ++k) {
      const double u = pi.update(err(rng), dt);
      CHECK(std::abs(u) <= 10.0);
    }
  }
}

TEST_CASE("PI controller: integrator recovers after saturation") {
  // Long positive error saturates the output; once the error flips sign the
  // output must leave the rail (no windup ratchet).
  PiController pi;
  for (int k = 0; k < 2000; ++k) CHECK(pi.update(5e-3, 1e-3) == 10.0);
  double u = 10.0;
  for (int k = 0; k < 50 && u >= 10.0; ++k) u = pi.update(-5e-3, 1e-3);
  CHECK(u < 10.0);
}

TEST_CASE("boundary-layer baseline: point values") {
  const BoundarySmcGains g{};  // eta 863.1, beta 1.3, width 1e-3
  CHECK(boundary_smc_control(0.0, 0.0, g, kSurface) == 0.0);
  // Interior of the band: linear interpolation of the switch term.
  CHECK(boundary_smc_control(5e-4, 0.0, g, kSurface) ==
        doctest::Approx(1.08155).epsilon(1e-12));
  // At the band edge the smoothed switch saturates to 1.
  CHECK(boundary_smc_control(1e-3, 0.0, g, kSurface) ==
        doctest::Approx(2.1631).epsilon(1e-12));
  // Outside the band: full switching authority.
  CHECK(boundary_smc_control(2e-3, 0.0, g, kSurface) ==
        doctest::Approx(3.0262).epsilon(1e-12));

  BoundarySmcGains bad = g;
  bad.boundary_width = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  SlidingSurfaceSpec order3;
  order3.lambda = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(boundary_smc_control(0.0, 0.0, g, order3),
                  std::invalid_argument);
}

TEST_CASE("gain validation") {
  SmcpmcGains g = kGains;
  g.eta = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = kGains;
  g.beta = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  CHECK_NOTHROW(kGains.validate());
}
