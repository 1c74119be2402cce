#pragma once

#include <Eigen/Dense>

#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "coopsafe/safety.hpp"

namespace coopsafe {

struct OperatorWaypoint {
  double t = 0.0;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();

  bool operator==(const OperatorWaypoint& other) const = default;
};

// Scripted chest trajectory: shape-preserving cubic Hermite through timed
// waypoints, held constant before the first and after the last one.
class ScriptedOperator {
 public:
  ScriptedOperator() = default;
  explicit ScriptedOperator(std::vector<OperatorWaypoint> waypoints);

  OperatorState eval(double t) const;
  const std::vector<OperatorWaypoint>& waypoints() const { return waypoints_; }

 private:
  std::vector<OperatorWaypoint> waypoints_;
  std::vector<Eigen::Vector3d> slopes_;
};

// Latest injected position with velocity and acceleration from exponentially
// smoothed finite differences (time constant tau).
class ExternalOperatorEstimator {
 public:
  explicit ExternalOperatorEstimator(const Eigen::Vector3d& spawn, double tau = 0.05);

  // Advances the estimate by dt with the newest sample, if any arrived.
  OperatorState update(const std::optional<Eigen::Vector3d>& sample, double dt);
  OperatorState state() const;
  bool has_samples() const { return has_samples_; }

 private:
  double tau_;
  Eigen::Vector3d p_;
  Eigen::Vector3d v_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d a_ = Eigen::Vector3d::Zero();
  bool has_samples_ = false;
};

// Ordered, thread-safe queue of injected operator positions. Producers push
// from any thread; the simulator drains it at the start of each tick.
class OperatorMailbox {
 public:
  void push(const Eigen::Vector3d& p);
  // Returns every queued sample in arrival order and empties the queue.
  std::vector<Eigen::Vector3d> drain();

 private:
  std::mutex mutex_;
  std::deque<Eigen::Vector3d> queue_;
};

}  // namespace coopsafe
