#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <limits>
#include <string>
#include <vector>

namespace coopsafe {

enum class JointType { kRevolute, kPrismatic };

// kPlanarHolonomic prepends two prismatic DOFs translating the whole chain
// along world x and y.
enum class BaseKind { kFixed, kPlanarHolonomic };

// Task space of a single end-effector.
//   kPlanar:  x = (x, y, yaw), p = 3. Requires every rotation in the chain to
//             be about world z; yaw is accumulated without wrapping.
//   kSpatial: x = (x, y, z, roll, pitch, yaw), p = 6, R = Rz(yaw) Ry(pitch) Rx(roll).
enum class TaskSpace { kPlanar, kSpatial };

int task_dimension(TaskSpace space);

struct Pose {
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();

  Eigen::Isometry3d transform() const;
  bool operator==(const Pose& other) const = default;
};

struct Segment {
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();

  double length() const { return (end - start).norm(); }
  bool operator==(const Segment& other) const = default;
};

struct JointSpec {
  JointType type = JointType::kRevolute;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Pose offset;  // parent frame -> joint frame at q = 0
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  Segment segment;  // link geometry, expressed in the joint frame

  bool operator==(const JointSpec& other) const = default;
};

// Serial chain of one (possibly mobile) manipulator.
//
// Links are indexed 0..link_count()-1 for the physical segments attached to
// each joint; index link_count() is the virtual end-effector link running from
// the last joint frame origin (or the base frame when there are no joints) to
// the tool point.
struct RobotModel {
  std::string name;
  BaseKind base_kind = BaseKind::kFixed;
  Pose base_pose;
  std::vector<JointSpec> joints;
  Pose tool_offset;  // last joint frame -> tool frame

  std::size_t base_dof() const { return base_kind == BaseKind::kPlanarHolonomic ? 2 : 0; }
  std::size_t dof() const { return base_dof() + joints.size(); }
  std::size_t link_count() const { return joints.size(); }
  std::size_t segment_count() const { return joints.size() + 1; }
  std::size_t virtual_link() const { return joints.size(); }

  // L_l, including the virtual link for l == virtual_link().
  double link_length(std::size_t l) const;
  // L^i = sum over all segments including the virtual one.
  double total_length() const;

  // Throws ContractViolation on malformed geometry or when the chain is not
  // compatible with the requested task space.
  void validate(TaskSpace space) const;

  bool operator==(const RobotModel& other) const = default;
};

struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd q_dot;
};

struct LinkPoint {
  std::size_t robot = 0;
  std::size_t link = 0;
  double r = 0.0;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_dot = Eigen::Vector3d::Zero();
};

struct ForwardKinematics {
  Eigen::Isometry3d base_frame = Eigen::Isometry3d::Identity();
  std::vector<Eigen::Isometry3d> joint_frames;  // world pose after each joint's motion
  Eigen::Isometry3d tool_frame = Eigen::Isometry3d::Identity();
  Eigen::VectorXd x;  // end-effector configuration, p entries

  // Frame rigidly carrying link l (the virtual link rides on the last joint).
  const Eigen::Isometry3d& link_frame(std::size_t l) const;
};

// World-frame endpoints and endpoint velocities of one segment.
struct SegmentState {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d v0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d v1 = Eigen::Vector3d::Zero();

  Eigen::Vector3d point(double r) const { return p0 + r * (p1 - p0); }
  Eigen::Vector3d velocity(double r) const { return v0 + r * (v1 - v0); }
};

// Endpoint positional Jacobians and the drift terms Jdot*qdot of one segment.
// Point Jacobians are affine in r, so endpoints are sufficient.
struct SegmentJacobians {
  Eigen::Matrix3Xd j0;
  Eigen::Matrix3Xd j1;
  Eigen::Vector3d jdot_qdot0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d jdot_qdot1 = Eigen::Vector3d::Zero();

  Eigen::Matrix3Xd jacobian(double r) const { return j0 + r * (j1 - j0); }
  Eigen::Vector3d jdot_qdot(double r) const { return jdot_qdot0 + r * (jdot_qdot1 - jdot_qdot0); }
};

ForwardKinematics forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q,
                                     TaskSpace space = TaskSpace::kPlanar);

// World endpoints of link l under the given forward kinematics.
Segment segment_in_world(const RobotModel& model, const ForwardKinematics& fk, std::size_t l);

LinkPoint point_on_link(const RobotModel& model, const JointState& state, std::size_t l, double r);

Eigen::Matrix3Xd point_jacobian(const RobotModel& model, const Eigen::VectorXd& q, std::size_t l,
                                double r);

// Task Jacobian J_i (p x n_i) of the end-effector configuration.
Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& q,
                         TaskSpace space = TaskSpace::kPlanar);

// Central difference of J along qdot with step 1e-6. Exactly zero for qdot = 0.
Eigen::MatrixXd jacobian_dot(const RobotModel& model, const JointState& state,
                             TaskSpace space = TaskSpace::kPlanar);

std::vector<SegmentState> segment_states(const RobotModel& model, const JointState& state);

// Endpoint Jacobians for all segments; drift terms by the same central
// difference as jacobian_dot.
std::vector<SegmentJacobians> segment_jacobians(const RobotModel& model, const JointState& state);

// J^T (J J^T + lambda^2 I)^-1 for wide or square J, (J^T J + lambda^2 I)^-1 J^T
// for tall J. With lambda == 0 a rank-deficient J raises SingularityError.
Eigen::MatrixXd damped_pseudoinverse(const Eigen::MatrixXd& j, double lambda);

// Euler angle rates -> angular velocity map for R = Rz(yaw) Ry(pitch) Rx(roll).
Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& rpy);

void check_joint_state(const RobotModel& model, const JointState& state);

// Indices of joints whose position lies outside [min, max]. Limits are
// reported, never enforced.
std::vector<std::size_t> joints_out_of_limits(const RobotModel& model, const Eigen::VectorXd& q);

}  // namespace coopsafe
