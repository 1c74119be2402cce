#include "coopsafe/supervisor.hpp"

#include <cmath>

namespace coopsafe {
namespace {

// Tick times are sums of dt; the dwell compare absorbs their rounding.
constexpr double kTimeSlack = 1e-9;

}  // namespace

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::kNominalTracking:
      return "NominalTracking";
    case Phase::kScaledTracking:
      return "ScaledTracking";
    case Phase::kPathDeformation:
      return "PathDeformation";
  }
  return "NominalTracking";
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (Phase p : {Phase::kNominalTracking, Phase::kScaledTracking, Phase::kPathDeformation}) {
    if (phase_name(p) == name) return p;
  }
  return std::nullopt;
}

std::string_view reason_name(SwitchReason reason) {
  switch (reason) {
    case SwitchReason::kNone:
      return "none";
    case SwitchReason::kFloorReached:
      return "floor_reached";
    case SwitchReason::kFloorViolated:
      return "floor_violated";
    case SwitchReason::kInfeasible:
      return "infeasible";
    case SwitchReason::kRecovered:
      return "recovered";
    case SwitchReason::kHomed:
      return "homed";
  }
  return "none";
}

bool Supervisor::dwell_elapsed(double since, double t) const {
  return t - since >= config_.t_dwell - kTimeSlack;
}

Phase Supervisor::enter(Phase next, SwitchReason reason, double t) {
  phase_ = next;
  entered_at_ = t;
  last_switch_ = t;
  reason_ = reason;
  infeasible_since_.reset();
  return phase_;
}

Phase Supervisor::transition(const SupervisorInputs& in, double t) {
  const bool below_floor = in.F < in.f_min - in.eps_f;
  if (phase_ != Phase::kPathDeformation) {
    if (in.feasible) {
      infeasible_since_.reset();
    } else if (!infeasible_since_) {
      infeasible_since_ = t;
    }
  }
  if (!dwell_elapsed(last_switch_, t)) return phase_;

  switch (phase_) {
    case Phase::kNominalTracking:
      if (in.bounds_active && (in.clamp_engaged || below_floor || !in.feasible)) {
        return enter(Phase::kScaledTracking,
                     below_floor ? SwitchReason::kFloorViolated : SwitchReason::kFloorReached, t);
      }
      break;
    case Phase::kScaledTracking:
      if (below_floor) return enter(Phase::kPathDeformation, SwitchReason::kFloorViolated, t);
      if (infeasible_since_ && dwell_elapsed(*infeasible_since_, t)) {
        return enter(Phase::kPathDeformation, SwitchReason::kInfeasible, t);
      }
      if (!in.bounds_active && std::abs(in.delta_s) <= config_.home_tol &&
          std::abs(in.delta_s_dot) <= config_.home_tol) {
        return enter(Phase::kNominalTracking, SwitchReason::kHomed, t);
      }
      break;
    case Phase::kPathDeformation:
      if (in.recovered) return enter(Phase::kScaledTracking, SwitchReason::kRecovered, t);
      break;
  }
  return phase_;
}

}  // namespace coopsafe
