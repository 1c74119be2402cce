#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coopsafe/simulator.hpp"

namespace coopsafe {

struct RobotTelemetry {
  std::string name;
  Eigen::VectorXd q;
  Eigen::VectorXd ee;  // end-effector configuration x_i
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> links;  // world segment endpoints
};

struct TelemetryMessage {
  double t = 0.0;
  Phase phase = Phase::kNominalTracking;
  double F = 0.0;
  double F_min = 0.0;
  double d_actual = 0.0;
  double s_n = 0.0;
  double s_r = 0.0;
  double delta_s = 0.0;
  double f_r_norm = 0.0;
  std::vector<RobotTelemetry> robots;
  Eigen::Vector3d op_p = Eigen::Vector3d::Zero();
  Eigen::Vector3d op_p_dot = Eigen::Vector3d::Zero();
};

// Snapshot of one evaluated tick; link endpoints come from forward kinematics
// at the recorded joint positions.
TelemetryMessage make_telemetry(const TraceRecord& record, const Simulator& sim);

std::string to_json(const TelemetryMessage& msg);
TelemetryMessage telemetry_from_json(const std::string& text);

enum class ControlAction { kStart, kPause, kReset, kSetSpeed };

struct ClientCommand {
  enum class Kind { kOperator, kControl };
  Kind kind = Kind::kOperator;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  ControlAction action = ControlAction::kStart;
  double value = 1.0;  // set_speed factor
};

struct CommandParse {
  std::optional<ClientCommand> command;
  std::string error;  // set when command is empty
};

CommandParse parse_command(const std::string& text);
std::string to_json(const ClientCommand& cmd);
std::string error_json(const std::string& detail);

}  // namespace coopsafe
