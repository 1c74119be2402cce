#pragma once

#include <limits>
#include <optional>
#include <string_view>

namespace coopsafe {

enum class Phase { kNominalTracking, kScaledTracking, kPathDeformation };

std::string_view phase_name(Phase phase);
std::optional<Phase> parse_phase(std::string_view name);

enum class SwitchReason {
  kNone,
  kFloorReached,    // saturation engaged at the safety floor
  kFloorViolated,   // F dropped below F_min - eps_F
  kInfeasible,      // scaling could not hold the floor for the dwell time
  kRecovered,       // deformation transient vanished with no repulsion left
  kHomed,           // delta_s and its rate returned to zero
};

std::string_view reason_name(SwitchReason reason);

struct SupervisorConfig {
  double t_dwell = 0.05;
  double home_tol = 1e-6;

  bool operator==(const SupervisorConfig& other) const = default;
};

// Everything the guards look at, all from the same tick.
struct SupervisorInputs {
  double F = 0.0;
  double f_min = 0.0;
  double eps_f = 0.0;
  bool bounds_active = false;
  bool clamp_engaged = false;
  bool feasible = true;
  double delta_s = 0.0;
  double delta_s_dot = 0.0;
  bool recovered = false;  // only read during deformation
};

// Nominal <-> scaled <-> deformation state machine. Every phase is held for at
// least t_dwell before the next switch; deformation is entered only from the
// scaled phase and always returns to it.
class Supervisor {
 public:
  explicit Supervisor(SupervisorConfig config = {}) : config_(config) {}

  Phase transition(const SupervisorInputs& in, double t);

  Phase phase() const { return phase_; }
  double entered_at() const { return entered_at_; }
  SwitchReason last_reason() const { return reason_; }
  const SupervisorConfig& config() const { return config_; }

 private:
  bool dwell_elapsed(double since, double t) const;
  Phase enter(Phase next, SwitchReason reason, double t);

  SupervisorConfig config_;
  Phase phase_ = Phase::kNominalTracking;
  double entered_at_ = 0.0;
  double last_switch_ = -std::numeric_limits<double>::infinity();
  std::optional<double> infeasible_since_;
  SwitchReason reason_ = SwitchReason::kNone;
};

}  // namespace coopsafe
