#include "coopsafe/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "coopsafe/errors.hpp"

namespace coopsafe {
namespace {

constexpr double kFeasibilityTol = 1e-6;

void check_window(double t0, double tf, double s_end) {
  if (!std::isfinite(t0) || !std::isfinite(tf) || !(tf > t0)) {
    throw ConfigurationError("timing law needs finite t0 < tf");
  }
  if (!(s_end > 0.0) || !std::isfinite(s_end)) {
    throw ConfigurationError("timing law needs a positive path length");
  }
}

}  // namespace

TimingLaw TimingLaw::trapezoidal(double t0, double tf, double s_end, double v_max, double a_max) {
  check_window(t0, tf, s_end);
  if (!(v_max > 0.0) || !(a_max > 0.0)) {
    throw ConfigurationError("trapezoidal timing needs positive vMax and aMax");
  }
  const double T = tf - t0;
  // s_end = v (T - v / a) for the profile with blend time v / a.
  const double disc = a_max * a_max * T * T - 4.0 * a_max * s_end;
  if (disc < 0.0) {
    throw ConfigurationError("aMax is too small to cover the path in the given time");
  }
  const double v = 0.5 * (a_max * T - std::sqrt(disc));
  if (v > v_max * (1.0 + 1e-12)) {
    throw ConfigurationError("covering the path in the given time needs a cruise speed of " +
                             std::to_string(v) + " above vMax");
  }
  TimingLaw law;
  law.profile_ = TimingProfile::kTrapezoidal;
  law.t0_ = t0;
  law.tf_ = tf;
  law.s_end_ = s_end;
  law.v_max_ = v_max;
  law.a_max_ = a_max;
  law.cruise_ = v;
  law.t_blend_ = v / a_max;
  return law;
}

TimingLaw TimingLaw::cubic(double t0, double tf, double s_end) {
  check_window(t0, tf, s_end);
  TimingLaw law;
  law.profile_ = TimingProfile::kCubic;
  law.t0_ = t0;
  law.tf_ = tf;
  law.s_end_ = s_end;
  law.cruise_ = 1.5 * s_end / (tf - t0);
  return law;
}

TimingSample TimingLaw::eval(double t) const {
  if (t < t0_) return {0.0, 0.0, 0.0};
  if (t > tf_) return {s_end_, 0.0, 0.0};
  const double T = tf_ - t0_;
  const double tau = t - t0_;
  if (profile_ == TimingProfile::kCubic) {
    const double u = tau / T;
    return {s_end_ * (3.0 * u * u - 2.0 * u * u * u), s_end_ * 6.0 * u * (1.0 - u) / T,
            s_end_ * (6.0 - 12.0 * u) / (T * T)};
  }
  const double a = a_max_;
  if (tau < t_blend_) return {0.5 * a * tau * tau, a * tau, a};
  const double rest = T - tau;
  if (rest < t_blend_) return {s_end_ - 0.5 * a * rest * rest, a * rest, -a};
  return {0.5 * a * t_blend_ * t_blend_ + cruise_ * (tau - t_blend_), cruise_, 0.0};
}

ScalingBounds scaling_bounds(double mu1, double mu2, double F, const SafetyConfig& config) {
  ScalingBounds b;
  if (F > config.f_min + config.eps_f()) return b;
  if (mu1 < -config.eps_mu) {
    b.max = -mu2 / mu1;
  } else if (mu1 > config.eps_mu) {
    b.min = -mu2 / mu1;
  } else {
    b.mu_degenerate = true;
  }
  return b;
}

void scaling_acceleration(ScalingState& state, const ScalingBounds& bounds,
                          const ScalingGains& gains, const TimingSample& now) {
  state.bounds = bounds;
  state.raw_delta_s_ddot = -gains.k_d * state.delta_s_dot - gains.k_p * state.delta_s;
  double a = std::clamp(state.raw_delta_s_ddot, bounds.min, bounds.max);
  // Resting on the velocity floor: s_ddot_r < 0 would be undone by the
  // projection, so it is never commanded.
  if (state.velocity_floor_active) a = std::max(a, -now.s_ddot);
  if (state.endpoint_active) a = std::min(a, -now.s_ddot);
  state.delta_s_ddot = a;
  state.clamp_engaged = a != state.raw_delta_s_ddot;
}

void integrate_scaling(ScalingState& state, const TimingSample& now, const TimingSample& next,
                       double s_end, double dt) {
  const double s_r_now = now.s + state.delta_s;
  state.delta_s_dot += state.delta_s_ddot * dt;
  bool floor = false;
  if (next.s_dot + state.delta_s_dot < 0.0) {
    state.delta_s_dot = -next.s_dot;
    floor = true;
  }
  state.delta_s += state.delta_s_dot * dt;
  if (next.s + state.delta_s < s_r_now) state.delta_s = s_r_now - next.s;

  bool end = false;
  if (next.s + state.delta_s >= s_end - kEndpointTol) {
    state.delta_s = std::min(state.delta_s, s_end - next.s);
    if (next.s_dot + state.delta_s_dot > 0.0) state.delta_s_dot = -next.s_dot;
    end = true;
  }
  state.velocity_floor_active = floor || next.s_dot + state.delta_s_dot <= kVelocityFloorTol;
  state.endpoint_active = end;
}

ScalingState scaling_step(ScalingState state, const ScalingBounds& bounds,
                          const ScalingGains& gains, const TimingSample& now,
                          const TimingSample& next, double s_end, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("scaling step needs dt > 0");
  scaling_acceleration(state, bounds, gains, now);
  integrate_scaling(state, now, next, s_end, dt);
  return state;
}

Feasibility check_constraints(const ScalingState& state, const ScalingBounds& bounds,
                              double s_ddot_n, double F, const SafetyConfig& config) {
  if (F > config.f_min + config.eps_f()) return {};
  if (bounds.mu_degenerate) return {false, "mu1 degenerate at the safety floor"};
  if (state.velocity_floor_active && bounds.max < -s_ddot_n - kFeasibilityTol) {
    return {false, "keeping F at the floor needs reverse motion along the path"};
  }
  if (state.endpoint_active && bounds.min > -s_ddot_n + kFeasibilityTol) {
    return {false, "keeping F at the floor needs motion past the path end"};
  }
  return {};
}

}  // namespace coopsafe
