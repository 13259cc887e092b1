#pragma once

// Reference trajectories with exact analytic derivatives. The tracking loop
// never differentiates the reference numerically; y_d, v_d, a_d come from
// the closed forms here.

#include <string>

namespace piezosim {

struct ReferenceSpec {
  enum class Kind { sinusoid, triangle, pulse, constant };
  Kind kind = Kind::sinusoid;
  double amplitude_m = 0.01;
  double freq_rad_s = 3.14159265358979323846;  // angular frequency
  double phase_rad = -1.57079632679489661923;
  double offset_m = 0.01;

  bool operator==(const ReferenceSpec&) const = default;
};

// Default spec: y_d = 0.01 * (1 + sin(pi*t - pi/2)) m, starting from rest
// (y_d(0) = 0, v_d(0) = 0).
class ReferenceTrajectory {
 public:
  explicit ReferenceTrajectory(const ReferenceSpec& spec);

  double y_d(double t) const;
  double v_d(double t) const;
  double a_d(double t) const;
  const ReferenceSpec& spec() const { return spec_; }

 private:
  ReferenceSpec spec_;
  double period_ = 0.0;  // triangle/pulse kinds
};

ReferenceTrajectory make_reference(const ReferenceSpec& spec);

}  // namespace piezosim
