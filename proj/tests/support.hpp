#pragma once

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

#include "coopsafe/kinematics.hpp"
#include "coopsafe/scenario.hpp"

namespace coopsafe::testing {

inline std::string data_path(const std::string& name) { return std::string(COOPSAFE_TEST_DATA) + "/" + name; }
inline std::string scenario_path(const std::string& name) {
  return std::string(COOPSAFE_SCENARIO_DIR) + "/" + name;
}

// Serial chain of revolute-z joints laid out along the local x axis.
inline RobotModel planar_arm(const std::vector<double>& lengths, double tool,
                             BaseKind base = BaseKind::kFixed) {
  RobotModel m;
  m.name = "arm";
  m.base_kind = base;
  double offset = 0.0;
  for (double len : lengths) {
    JointSpec j;
    j.offset.xyz = Eigen::Vector3d(offset, 0.0, 0.0);
    j.segment.end = Eigen::Vector3d(len, 0.0, 0.0);
    m.joints.push_back(j);
    offset = len;
  }
  m.tool_offset.xyz = Eigen::Vector3d(tool, 0.0, 0.0);
  return m;
}

// Spatial chain with random axes, offsets and link geometry.
inline RobotModel random_spatial_arm(std::mt19937_64& rng, std::size_t joints) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> len(0.2, 0.6);
  RobotModel m;
  m.name = "spatial";
  m.base_pose.xyz = Eigen::Vector3d(u(rng), u(rng), 0.5 * u(rng));
  m.base_pose.rpy = Eigen::Vector3d(u(rng), u(rng), 3.0 * u(rng));
  double prev = 0.0;
  for (std::size_t k = 0; k < joints; ++k) {
    JointSpec j;
    j.axis = Eigen::Vector3d(u(rng), u(rng), u(rng)).normalized();
    j.offset.xyz = Eigen::Vector3d(prev, 0.0, 0.0);
    j.offset.rpy = Eigen::Vector3d(0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng));
    prev = len(rng);
    j.segment.end = Eigen::Vector3d(prev, 0.0, 0.0);
    m.joints.push_back(j);
  }
  m.tool_offset.xyz = Eigen::Vector3d(len(rng), 0.0, 0.0);
  return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = u(rng);
  return v;
}

inline JointState random_state(std::mt19937_64& rng, const RobotModel& m, double q_scale = 1.5,
                               double v_scale = 1.0) {
  const auto n = static_cast<Eigen::Index>(m.dof());
  return {random_vector(rng, n, q_scale), random_vector(rng, n, v_scale)};
}

}  // namespace coopsafe::testing
