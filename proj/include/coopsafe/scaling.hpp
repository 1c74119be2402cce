#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "coopsafe/safety.hpp"

namespace coopsafe {

enum class TimingProfile { kTrapezoidal, kCubic };

struct TimingSample {
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
};

// Nominal timing law s_n(t): non-decreasing from 0 at t0 to s_end at tf, at
// rest at both ends.
//
// The trapezoidal profile accelerates at a_max, cruises and decelerates at
// a_max; the cruise speed follows from the duration and must not exceed
// v_max. The cubic profile is s_end (3 u^2 - 2 u^3), u = (t - t0) / (tf - t0).
// Outside [t0, tf] the law holds its end value with zero velocity and
// acceleration.
class TimingLaw {
 public:
  TimingLaw() = default;
  static TimingLaw trapezoidal(double t0, double tf, double s_end, double v_max, double a_max);
  static TimingLaw cubic(double t0, double tf, double s_end);

  TimingSample eval(double t) const;

  TimingProfile profile() const { return profile_; }
  double t0() const { return t0_; }
  double tf() const { return tf_; }
  double s_end() const { return s_end_; }
  double v_max() const { return v_max_; }
  double a_max() const { return a_max_; }
  double cruise_speed() const { return cruise_; }

  bool operator==(const TimingLaw& other) const = default;

 private:
  TimingProfile profile_ = TimingProfile::kCubic;
  double t0_ = 0.0;
  double tf_ = 1.0;
  double s_end_ = 1.0;
  double v_max_ = 0.0;
  double a_max_ = 0.0;
  double cruise_ = 0.0;
  double t_blend_ = 0.0;
};

struct ScalingGains {
  double k_d = 4.5;
  double k_p = 5.0;

  bool operator==(const ScalingGains& other) const = default;
};

struct ScalingBounds {
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  bool mu_degenerate = false;

  bool active() const { return std::isfinite(min) || std::isfinite(max); }
};

struct ScalingState {
  double delta_s = 0.0;
  double delta_s_dot = 0.0;
  double delta_s_ddot = 0.0;
  double raw_delta_s_ddot = 0.0;  // homing command before saturation
  ScalingBounds bounds;
  bool clamp_engaged = false;
  bool velocity_floor_active = false;
  bool endpoint_active = false;
};

inline constexpr double kVelocityFloorTol = 1e-9;
inline constexpr double kEndpointTol = 1e-9;

// Saturation bounds keeping F_dot >= 0 once F reaches the floor.
ScalingBounds scaling_bounds(double mu1, double mu2, double F, const SafetyConfig& config);

// Saturated homing acceleration sat(-k_d delta_s_dot - k_p delta_s, bounds).
// While the reference rests on the velocity floor (or at the path end) the
// result is further limited so that s_ddot_r cannot point backwards (or past
// the end). Updates delta_s_ddot, raw_delta_s_ddot, bounds and clamp_engaged.
void scaling_acceleration(ScalingState& state, const ScalingBounds& bounds,
                          const ScalingGains& gains, const TimingSample& now);

// Semi-implicit integration of the current delta_s_ddot over dt followed by
// projection onto s_dot_r >= 0, s_r non-decreasing and s_r <= s_n(tf).
// `now` and `next` are the timing law at the start and end of the step.
void integrate_scaling(ScalingState& state, const TimingSample& now, const TimingSample& next,
                       double s_end, double dt);

// scaling_acceleration followed by integrate_scaling.
ScalingState scaling_step(ScalingState state, const ScalingBounds& bounds,
                          const ScalingGains& gains, const TimingSample& now,
                          const TimingSample& next, double s_end, double dt);

struct Feasibility {
  bool feasible = true;
  std::string reason;
};

// Whether saturated scaling can still keep F >= F_min without reversing along
// the path or overshooting its end.
Feasibility check_constraints(const ScalingState& state, const ScalingBounds& bounds,
                              double s_ddot_n, double F, const SafetyConfig& config);

}  // namespace coopsafe
