#include "coopsafe/kinematics.hpp"

#include <cmath>
#include <string>

#include "coopsafe/errors.hpp"

namespace coopsafe {
namespace {

constexpr double kJdotStep = 1e-6;
constexpr double kAxisTol = 1e-12;

Eigen::Matrix3d rpy_rotation(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Vector3d rotation_rpy(const Eigen::Matrix3d& r) {
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  const double pitch = std::atan2(-r(2, 0), std::hypot(r(2, 1), r(2, 2)));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  return {roll, pitch, yaw};
}

void check_link(const RobotModel& model, std::size_t l) {
  if (l > model.virtual_link()) {
    throw ContractViolation("link index " + std::to_string(l) + " out of range for robot '" +
                            model.name + "' with " + std::to_string(model.segment_count()) +
                            " segments");
  }
}

void check_q(const RobotModel& model, const Eigen::VectorXd& q) {
  if (static_cast<std::size_t>(q.size()) != model.dof()) {
    throw ContractViolation("joint vector of size " + std::to_string(q.size()) + " for robot '" +
                            model.name + "' with " + std::to_string(model.dof()) + " DOFs");
  }
}

// World-frame velocity Jacobian column block of a material point w riding on
// link l.
Eigen::Matrix3Xd material_point_jacobian(const RobotModel& model, const ForwardKinematics& fk,
                                         const Eigen::Vector3d& w, std::size_t l) {
  const std::size_t nb = model.base_dof();
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(model.dof()));
  if (nb == 2) {
    jac.col(0) = Eigen::Vector3d::UnitX();
    jac.col(1) = Eigen::Vector3d::UnitY();
  }
  // Physical link l moves with joints 0..l; the virtual link with all joints.
  const std::size_t last = (l == model.virtual_link()) ? model.joints.size() : l + 1;
  for (std::size_t k = 0; k < last; ++k) {
    const JointSpec& joint = model.joints[k];
    const Eigen::Isometry3d& frame = fk.joint_frames[k];
    const Eigen::Vector3d axis = frame.linear() * joint.axis.normalized();
    const auto c = static_cast<Eigen::Index>(nb + k);
    if (joint.type == JointType::kRevolute) {
      jac.col(c) = axis.cross(w - frame.translation());
    } else {
      jac.col(c) = axis;
    }
  }
  return jac;
}

// Angular velocity Jacobian of the tool frame (world frame).
Eigen::Matrix3Xd angular_jacobian(const RobotModel& model, const ForwardKinematics& fk) {
  const std::size_t nb = model.base_dof();
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(model.dof()));
  for (std::size_t k = 0; k < model.joints.size(); ++k) {
    const JointSpec& joint = model.joints[k];
    if (joint.type == JointType::kRevolute) {
      jac.col(static_cast<Eigen::Index>(nb + k)) =
          fk.joint_frames[k].linear() * joint.axis.normalized();
    }
  }
  return jac;
}

Eigen::MatrixXd task_jacobian(const RobotModel& model, const ForwardKinematics& fk,
                              TaskSpace space) {
  const Eigen::Vector3d tool = fk.tool_frame.translation();
  const Eigen::Matrix3Xd jp = material_point_jacobian(model, fk, tool, model.virtual_link());
  const Eigen::Matrix3Xd jw = angular_jacobian(model, fk);
  const auto n = static_cast<Eigen::Index>(model.dof());
  if (space == TaskSpace::kPlanar) {
    Eigen::MatrixXd j(3, n);
    j.row(0) = jp.row(0);
    j.row(1) = jp.row(1);
    j.row(2) = jw.row(2);
    return j;
  }
  Eigen::MatrixXd j(6, n);
  j.topRows(3) = jp;
  const Eigen::Vector3d rpy = fk.x.tail<3>();
  j.bottomRows(3) = euler_rate_matrix(rpy).inverse() * jw;
  return j;
}

}  // namespace

int task_dimension(TaskSpace space) { return space == TaskSpace::kPlanar ? 3 : 6; }

Eigen::Isometry3d Pose::transform() const {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = rpy_rotation(rpy);
  t.translation() = xyz;
  return t;
}

double RobotModel::link_length(std::size_t l) const {
  check_link(*this, l);
  if (l == virtual_link()) return tool_offset.xyz.norm();
  return joints[l].segment.length();
}

double RobotModel::total_length() const {
  double total = 0.0;
  for (std::size_t l = 0; l < segment_count(); ++l) total += link_length(l);
  return total;
}

void RobotModel::validate(TaskSpace space) const {
  auto fail = [this](const std::string& what) {
    throw ContractViolation("robot '" + name + "': " + what);
  };
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const JointSpec& joint = joints[k];
    const std::string where = "joint " + std::to_string(k);
    if (!joint.axis.allFinite() || joint.axis.norm() < kAxisTol) fail(where + " has a zero axis");
    if (!(joint.min <= joint.max)) fail(where + " has min > max");
    if (!joint.segment.start.allFinite() || !joint.segment.end.allFinite())
      fail(where + " segment is not finite");
    if (space == TaskSpace::kPlanar) {
      const Eigen::Vector3d a = joint.axis.normalized();
      if (joint.type == JointType::kRevolute && std::abs(std::abs(a.z()) - 1.0) > kAxisTol)
        fail(where + ": planar task space requires revolute axes along z");
      if (joint.type == JointType::kPrismatic && std::abs(a.z()) > kAxisTol)
        fail(where + ": planar task space requires prismatic axes in the xy plane");
      if (std::abs(joint.offset.rpy.x()) > kAxisTol || std::abs(joint.offset.rpy.y()) > kAxisTol)
        fail(where + ": planar task space requires offsets rotating about z only");
    }
  }
  if (space == TaskSpace::kPlanar) {
    for (const Pose* pose : {&base_pose, &tool_offset}) {
      if (std::abs(pose->rpy.x()) > kAxisTol || std::abs(pose->rpy.y()) > kAxisTol)
        fail("planar task space requires base and tool rotations about z only");
    }
  }
  if (dof() < static_cast<std::size_t>(task_dimension(space))) {
    fail("has " + std::to_string(dof()) + " DOFs, fewer than the task dimension " +
         std::to_string(task_dimension(space)));
  }
}

const Eigen::Isometry3d& ForwardKinematics::link_frame(std::size_t l) const {
  if (l < joint_frames.size()) return joint_frames[l];
  return joint_frames.empty() ? base_frame : joint_frames.back();
}

ForwardKinematics forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q,
                                     TaskSpace space) {
  check_q(model, q);
  ForwardKinematics fk;
  fk.base_frame = model.base_pose.transform();
  const std::size_t nb = model.base_dof();
  if (nb == 2) fk.base_frame.pretranslate(Eigen::Vector3d(q(0), q(1), 0.0));

  fk.joint_frames.reserve(model.joints.size());
  Eigen::Isometry3d frame = fk.base_frame;
  double yaw = model.base_pose.rpy.z();
  for (std::size_t k = 0; k < model.joints.size(); ++k) {
    const JointSpec& joint = model.joints[k];
    const double qk = q(static_cast<Eigen::Index>(nb + k));
    const Eigen::Vector3d axis = joint.axis.normalized();
    frame = frame * joint.offset.transform();
    yaw += joint.offset.rpy.z();
    if (joint.type == JointType::kRevolute) {
      frame.rotate(Eigen::AngleAxisd(qk, axis));
      yaw += axis.z() * qk;
    } else {
      frame.translate(axis * qk);
    }
    fk.joint_frames.push_back(frame);
  }
  fk.tool_frame = fk.link_frame(model.virtual_link()) * model.tool_offset.transform();
  yaw += model.tool_offset.rpy.z();

  const Eigen::Vector3d tool = fk.tool_frame.translation();
  if (space == TaskSpace::kPlanar) {
    fk.x = Eigen::Vector3d(tool.x(), tool.y(), yaw);
  } else {
    fk.x.resize(6);
    fk.x.head<3>() = tool;
    fk.x.tail<3>() = rotation_rpy(fk.tool_frame.linear());
  }
  return fk;
}

Segment segment_in_world(const RobotModel& model, const ForwardKinematics& fk, std::size_t l) {
  check_link(model, l);
  const Eigen::Isometry3d& frame = fk.link_frame(l);
  if (l == model.virtual_link()) {
    return {frame.translation(), fk.tool_frame.translation()};
  }
  const Segment& local = model.joints[l].segment;
  return {frame * local.start, frame * local.end};
}

void check_joint_state(const RobotModel& model, const JointState& state) {
  check_q(model, state.q);
  if (state.q_dot.size() != state.q.size()) {
    throw ContractViolation("joint velocity vector of size " + std::to_string(state.q_dot.size()) +
                            " for robot '" + model.name + "' with " +
                            std::to_string(model.dof()) + " DOFs");
  }
}

LinkPoint point_on_link(const RobotModel& model, const JointState& state, std::size_t l,
                        double r) {
  check_joint_state(model, state);
  check_link(model, l);
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ContractViolation("link fraction r = " + std::to_string(r) + " outside [0, 1]");
  }
  const ForwardKinematics fk = forward_kinematics(model, state.q);
  const Segment seg = segment_in_world(model, fk, l);
  LinkPoint point;
  point.link = l;
  point.r = r;
  const Eigen::Vector3d v0 = material_point_jacobian(model, fk, seg.start, l) * state.q_dot;
  const Eigen::Vector3d v1 = material_point_jacobian(model, fk, seg.end, l) * state.q_dot;
  point.p = seg.start + r * (seg.end - seg.start);
  point.p_dot = v0 + r * (v1 - v0);
  return point;
}

Eigen::Matrix3Xd point_jacobian(const RobotModel& model, const Eigen::VectorXd& q, std::size_t l,
                                double r) {
  check_link(model, l);
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ContractViolation("link fraction r = " + std::to_string(r) + " outside [0, 1]");
  }
  const ForwardKinematics fk = forward_kinematics(model, q);
  const Segment seg = segment_in_world(model, fk, l);
  return material_point_jacobian(model, fk, seg.start + r * (seg.end - seg.start), l);
}

Eigen::MatrixXd jacobian(const RobotModel& model, const Eigen::VectorXd& q, TaskSpace space) {
  return task_jacobian(model, forward_kinematics(model, q, space), space);
}

Eigen::MatrixXd jacobian_dot(const RobotModel& model, const JointState& state, TaskSpace space) {
  check_joint_state(model, state);
  const auto p = static_cast<Eigen::Index>(task_dimension(space));
  const auto n = static_cast<Eigen::Index>(model.dof());
  if (state.q_dot.isZero(0.0)) return Eigen::MatrixXd::Zero(p, n);
  const Eigen::VectorXd step = kJdotStep * state.q_dot;
  return (jacobian(model, state.q + step, space) - jacobian(model, state.q - step, space)) /
         (2.0 * kJdotStep);
}

std::vector<SegmentState> segment_states(const RobotModel& model, const JointState& state) {
  check_joint_state(model, state);
  const ForwardKinematics fk = forward_kinematics(model, state.q);
  std::vector<SegmentState> out;
  out.reserve(model.segment_count());
  for (std::size_t l = 0; l < model.segment_count(); ++l) {
    const Segment seg = segment_in_world(model, fk, l);
    SegmentState s;
    s.p0 = seg.start;
    s.p1 = seg.end;
    s.v0 = material_point_jacobian(model, fk, seg.start, l) * state.q_dot;
    s.v1 = material_point_jacobian(model, fk, seg.end, l) * state.q_dot;
    out.push_back(s);
  }
  return out;
}

std::vector<SegmentJacobians> segment_jacobians(const RobotModel& model, const JointState& state) {
  check_joint_state(model, state);
  auto endpoint_jacobians = [&model](const Eigen::VectorXd& q) {
    const ForwardKinematics fk = forward_kinematics(model, q);
    std::vector<std::pair<Eigen::Matrix3Xd, Eigen::Matrix3Xd>> out;
    out.reserve(model.segment_count());
    for (std::size_t l = 0; l < model.segment_count(); ++l) {
      const Segment seg = segment_in_world(model, fk, l);
      out.emplace_back(material_point_jacobian(model, fk, seg.start, l),
                       material_point_jacobian(model, fk, seg.end, l));
    }
    return out;
  };

  const auto at_q = endpoint_jacobians(state.q);
  std::vector<SegmentJacobians> out(model.segment_count());
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l].j0 = at_q[l].first;
    out[l].j1 = at_q[l].second;
  }
  if (state.q_dot.isZero(0.0)) return out;

  const Eigen::VectorXd step = kJdotStep * state.q_dot;
  const auto plus = endpoint_jacobians(state.q + step);
  const auto minus = endpoint_jacobians(state.q - step);
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l].jdot_qdot0 = (plus[l].first - minus[l].first) * state.q_dot / (2.0 * kJdotStep);
    out[l].jdot_qdot1 = (plus[l].second - minus[l].second) * state.q_dot / (2.0 * kJdotStep);
  }
  return out;
}

Eigen::MatrixXd damped_pseudoinverse(const Eigen::MatrixXd& j, double lambda) {
  if (!j.allFinite()) throw ContractViolation("pseudoinverse of a non-finite matrix");
  if (!(lambda >= 0.0)) throw ContractViolation("damping must be non-negative");
  if (j.size() == 0) return Eigen::MatrixXd::Zero(j.cols(), j.rows());

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (lambda == 0.0) {
    const double tol = std::numeric_limits<double>::epsilon() *
                       static_cast<double>(std::max(j.rows(), j.cols())) * s(0);
    if (s(0) == 0.0 || s(s.size() - 1) <= tol) {
      throw SingularityError("undamped pseudoinverse of a rank-deficient matrix");
    }
  }
  const double l2 = lambda * lambda;
  const Eigen::VectorXd gain = s.unaryExpr([l2](double v) { return v / (v * v + l2); });
  return svd.matrixV() * gain.asDiagonal() * svd.matrixU().transpose();
}

Eigen::Matrix3d euler_rate_matrix(const Eigen::Vector3d& rpy) {
  const Eigen::Matrix3d rz = Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()).toRotationMatrix();
  Eigen::Matrix3d t;
  t.col(0) = rz * ry * Eigen::Vector3d::UnitX();
  t.col(1) = rz * Eigen::Vector3d::UnitY();
  t.col(2) = Eigen::Vector3d::UnitZ();
  return t;
}

std::vector<std::size_t> joints_out_of_limits(const RobotModel& model, const Eigen::VectorXd& q) {
  check_q(model, q);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < model.joints.size(); ++k) {
    const double v = q(static_cast<Eigen::Index>(model.base_dof() + k));
    if (v < model.joints[k].min || v > model.joints[k].max) out.push_back(k);
  }
  return out;
}

}  // namespace coopsafe
