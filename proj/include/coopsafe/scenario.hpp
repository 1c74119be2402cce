#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "coopsafe/deformation.hpp"
#include "coopsafe/kinematics.hpp"
#include "coopsafe/operator_model.hpp"
#include "coopsafe/path.hpp"
#include "coopsafe/safety.hpp"
#include "coopsafe/scaling.hpp"
#include "coopsafe/supervisor.hpp"
#include "coopsafe/task.hpp"

namespace coopsafe {

struct SimConfig {
  double dt = 0.001;
  double duration = 10.0;
  std::uint64_t seed = 0;
  double realtime_factor = 0.0;  // 0 runs as fast as possible

  void validate() const;
  bool operator==(const SimConfig& other) const = default;
};

enum class OperatorMode { kScripted, kExternal };

struct OperatorConfig {
  OperatorMode mode = OperatorMode::kScripted;
  Eigen::Vector3d spawn = Eigen::Vector3d(100.0, 100.0, 0.0);
  std::vector<OperatorWaypoint> waypoints;
};

struct TimingSpec {
  TimingProfile profile = TimingProfile::kCubic;
  double t0 = 0.0;
  double tf = 10.0;
  double v_max = 0.0;  // trapezoid only
  double a_max = 0.0;  // trapezoid only

  // Path parameter runs over [0, 1].
  TimingLaw build() const;
};

struct TaskConfig {
  TaskSpace space = TaskSpace::kPlanar;
  std::vector<Eigen::VectorXd> nominal_path;
  Interpolation interpolation = Interpolation::kLinear;
  TimingSpec timing;
};

struct Scenario {
  int version = 1;
  std::string name;
  std::vector<RobotModel> robots;
  std::vector<Eigen::VectorXd> q0;
  TaskConfig task;
  OperatorConfig op;
  GainsConfig gains;
  ScalingGains scaling;
  ImpedanceParams impedance;
  SupervisorConfig supervisor;
  SafetyFunctionParams safety_params;
  SafetyConfig safety;     // f_min already resolved
  bool derive_f_min = false;  // f_min came from safety.d_min
  SimConfig sim;

  TaskLayout layout() const { return {task.space, robots.size()}; }
};

bool operator==(const Scenario& a, const Scenario& b);

// Parses and validates a scenario document. Omitted gains take their default
// values; with deriveFMin the floor is computed from dMin. Throws
// ValidationError naming the offending field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

// Checks cross-field consistency of an in-memory scenario and resolves the
// impedance matrices and the derived floor. parse_scenario calls it.
void validate_scenario(Scenario& scenario);

std::string serialize_scenario(const Scenario& scenario, int indent = 2);

}  // namespace coopsafe
