#include "coopsafe/task.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "coopsafe/errors.hpp"

namespace coopsafe {

bool TaskLayout::is_angular(std::size_t k) const {
  return space == TaskSpace::kPlanar ? (k % 3) == 2 : (k % 6) >= 3;
}

std::vector<std::pair<std::size_t, int>> TaskLayout::centroid_translation() const {
  if (space == TaskSpace::kPlanar) return {{0, 0}, {1, 1}};
  return {{0, 0}, {1, 1}, {2, 2}};
}

double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, kTwoPi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

Eigen::VectorXd wrap_task_difference(const TaskLayout& layout, Eigen::VectorXd diff) {
  for (Eigen::Index k = 0; k < diff.size(); ++k) {
    if (layout.is_angular(static_cast<std::size_t>(k))) diff(k) = wrap_angle(diff(k));
  }
  return diff;
}

Eigen::MatrixXd TaskGeometry::selection(std::size_t i) const {
  if (i >= robots) throw ContractViolation("robot index " + std::to_string(i) + " out of range");
  const auto pp = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(pp, static_cast<Eigen::Index>(m()));
  gamma.block(0, static_cast<Eigen::Index>(i * p), pp, pp).setIdentity();
  return gamma;
}

TaskGeometry build_task_geometry(std::size_t robots, std::size_t p) {
  if (robots < 1 || p < 1) throw ContractViolation("task geometry needs N >= 1 and p >= 1");
  TaskGeometry g;
  g.robots = robots;
  g.p = p;
  const auto pp = static_cast<Eigen::Index>(p);
  const auto m = static_cast<Eigen::Index>(g.m());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(pp, pp);
  g.j_sigma = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < robots; ++i) {
    g.j_sigma.block(0, static_cast<Eigen::Index>(i) * pp, pp, pp) =
        eye / static_cast<double>(robots);
  }
  for (std::size_t k = 0; k + 1 < robots; ++k) {
    const auto row = static_cast<Eigen::Index>(k + 1) * pp;
    g.j_sigma.block(row, static_cast<Eigen::Index>(k) * pp, pp, pp) = -eye;
    g.j_sigma.block(row, static_cast<Eigen::Index>(k + 1) * pp, pp, pp) = eye;
  }
  g.j_sigma_inv = g.j_sigma.fullPivLu().inverse();
  return g;
}

Eigen::VectorXd task_value(const TaskGeometry& geometry, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != geometry.m()) {
    throw ContractViolation("stacked configuration has size " + std::to_string(x.size()) +
                            ", expected " + std::to_string(geometry.m()));
  }
  return geometry.j_sigma * x;
}

TaskState make_task_state(const TaskLayout& layout, const TaskGeometry& geometry,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& x_dot,
                          const ReferenceSample& reference) {
  TaskState task;
  task.sigma = task_value(geometry, x);
  task.sigma_dot = task_value(geometry, x_dot);
  if (reference.sigma.size() != task.sigma.size() ||
      reference.sigma_dot.size() != task.sigma.size() ||
      reference.sigma_ddot.size() != task.sigma.size()) {
    throw ContractViolation("reference dimension does not match the task dimension");
  }
  task.sigma_r = reference.sigma;
  task.sigma_r_dot = reference.sigma_dot;
  task.sigma_r_ddot = reference.sigma_ddot;
  task.sigma_tilde = wrap_task_difference(layout, task.sigma_r - task.sigma);
  task.sigma_tilde_dot = task.sigma_r_dot - task.sigma_dot;
  return task;
}

RobotTerms robot_terms(const RobotModel& model, const JointState& state, TaskSpace space,
                       double lambda_dls) {
  check_joint_state(model, state);
  RobotTerms terms;
  const ForwardKinematics fk = forward_kinematics(model, state.q, space);
  terms.x = fk.x;
  terms.jacobian = jacobian(model, state.q, space);
  terms.jacobian_pinv = damped_pseudoinverse(terms.jacobian, lambda_dls);
  terms.jdot_qdot = jacobian_dot(model, state, space) * state.q_dot;
  terms.x_dot = terms.jacobian * state.q_dot;
  return terms;
}

Eigen::VectorXd task_feedback(const TaskState& task, const GainsConfig& gains) {
  return task.sigma_r_ddot + gains.k_sigma * task.sigma_tilde_dot +
         gains.lambda_sigma * task.sigma_tilde;
}

namespace {

// Gamma_i J_sigma^-1 v without forming Gamma_i.
Eigen::VectorXd robot_share(const TaskGeometry& geometry, std::size_t i, const Eigen::VectorXd& v) {
  if (i >= geometry.robots) {
    throw ContractViolation("robot index " + std::to_string(i) + " out of range");
  }
  const auto pp = static_cast<Eigen::Index>(geometry.p);
  return geometry.j_sigma_inv.middleRows(static_cast<Eigen::Index>(i) * pp, pp) * v;
}

}  // namespace

Eigen::VectorXd clik_acceleration(const TaskGeometry& geometry, std::size_t i,
                                  const RobotTerms& terms, const TaskState& task,
                                  const GainsConfig& gains, const Eigen::VectorXd& qdd_null) {
  if (qdd_null.size() != terms.jacobian.cols()) {
    throw ContractViolation("null-space acceleration has the wrong size");
  }
  return terms.jacobian_pinv *
             (robot_share(geometry, i, task_feedback(task, gains)) - terms.jdot_qdot) +
         qdd_null;
}

Eigen::VectorXd clik_acceleration(const TaskGeometry& geometry, std::size_t i,
                                  const RobotModel& model, const JointState& state,
                                  TaskSpace space, const TaskState& task,
                                  const GainsConfig& gains, const Eigen::VectorXd& qdd_null) {
  return clik_acceleration(geometry, i, robot_terms(model, state, space, gains.lambda_dls), task,
                           gains, qdd_null);
}

AffineCommand clik_affine(const TaskGeometry& geometry, std::size_t i, const RobotTerms& terms,
                          const TaskState& task, const GainsConfig& gains,
                          const ReferenceSample& reference, const Eigen::VectorXd& qdd_null) {
  const Eigen::VectorXd rest = reference.accel_offset + gains.k_sigma * task.sigma_tilde_dot +
                               gains.lambda_sigma * task.sigma_tilde;
  AffineCommand cmd;
  cmd.slope = terms.jacobian_pinv * robot_share(geometry, i, reference.dsigma_ds);
  cmd.offset =
      terms.jacobian_pinv * (robot_share(geometry, i, rest) - terms.jdot_qdot) + qdd_null;
  return cmd;
}

Eigen::VectorXd nullspace_acceleration(const RobotTerms& terms, const Eigen::VectorXd& q_dot,
                                       const Eigen::VectorXd& gradient, const GainsConfig& gains) {
  const Eigen::Index n = terms.jacobian.cols();
  if (gradient.size() != n || q_dot.size() != n) {
    throw ContractViolation("null-space inputs do not match the robot DOFs");
  }
  if (!gradient.allFinite()) throw ContractViolation("non-finite safety gradient");
  const Eigen::VectorXd desired = gains.k_n * gradient - gains.k_damp * q_dot;
  return desired - terms.jacobian_pinv * (terms.jacobian * desired);
}

}  // namespace coopsafe
