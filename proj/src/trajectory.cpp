#include "piezosim/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace piezosim {

ReferenceTrajectory::ReferenceTrajectory(const ReferenceSpec& spec) : spec_(spec) {
  if (spec.amplitude_m < 0.0) {
    throw std::invalid_argument("reference amplitude must be >= 0");
  }
  switch (spec.kind) {
    case ReferenceSpec::Kind::sinusoid:
    case ReferenceSpec::Kind::constant:
      break;
    case ReferenceSpec::Kind::triangle:
    case ReferenceSpec::Kind::pulse:
      if (!(spec.freq_rad_s > 0.0)) {
        throw std::invalid_argument("periodic reference needs freq_rad_s > 0");
      }
      period_ = 2.0 * std::numbers::pi / spec.freq_rad_s;
      break;
  }
}

double ReferenceTrajectory::y_d(double t) const {
  const auto& s = spec_;
  switch (s.kind) {
    case ReferenceSpec::Kind::sinusoid:
      return s.offset_m + s.amplitude_m * std::sin(s.freq_rad_s * t + s.phase_rad);
    case ReferenceSpec::Kind::constant:
      return s.offset_m + s.amplitude_m;
    case ReferenceSpec::Kind::triangle: {
      const double x = std::fmod(std::fmod(t, period_) + period_, period_) / period_;
      // 0 -> 2A at half period -> back to 0
      const double tri = x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
      return s.offset_m + 2.0 * s.amplitude_m * tri;
    }
    case ReferenceSpec::Kind::pulse: {
      const double x = std::fmod(std::fmod(t, period_) + period_, period_) / period_;
      return s.offset_m + (x < 0.5 ? s.amplitude_m : 0.0);
    }
  }
  return 0.0;
}

double ReferenceTrajectory::v_d(double t) const {
  const auto& s = spec_;
  switch (s.kind) {
    case ReferenceSpec::Kind::sinusoid:
      return s.amplitude_m * s.freq_rad_s * std::cos(s.freq_rad_s * t + s.phase_rad);
    case ReferenceSpec::Kind::constant:
      return 0.0;
    case ReferenceSpec::Kind::triangle: {
      const double x = std::fmod(std::fmod(t, period_) + period_, period_) / period_;
      const double slope = 4.0 * s.amplitude_m / period_;
      return x < 0.5 ? slope : -slope;
    }
    case ReferenceSpec::Kind::pulse:
      return 0.0;  // discontinuous position; derivative defined as 0
  }
  return 0.0;
}

double ReferenceTrajectory::a_d(double t) const {
  const auto& s = spec_;
  if (s.kind == ReferenceSpec::Kind::sinusoid) {
    return -s.amplitude_m * s.freq_rad_s * s.freq_rad_s *
           std::sin(s.freq_rad_s * t + s.phase_rad);
  }
  return 0.0;
}

ReferenceTrajectory make_reference(const ReferenceSpec& spec) {
  return ReferenceTrajectory(spec);
}

}  // namespace piezosim
