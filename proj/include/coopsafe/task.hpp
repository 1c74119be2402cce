#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "coopsafe/kinematics.hpp"

namespace coopsafe {

// Which entries of the stacked task vector are angles and which are the
// centroid's Cartesian coordinates.
struct TaskLayout {
  TaskSpace space = TaskSpace::kPlanar;
  std::size_t robots = 1;

  std::size_t p() const { return static_cast<std::size_t>(task_dimension(space)); }
  std::size_t m() const { return robots * p(); }
  bool is_angular(std::size_t k) const;
  // Task indices of the centroid's translational coordinates, paired with the
  // Cartesian axis (0 = x, 1 = y, 2 = z) each one represents.
  std::vector<std::pair<std::size_t, int>> centroid_translation() const;
  // First index of the relative (formation) block; equals m() for N = 1.
  std::size_t relative_begin() const { return p(); }
};

// Wraps the angular entries of a task-space difference into (-pi, pi].
Eigen::VectorXd wrap_task_difference(const TaskLayout& layout, Eigen::VectorXd diff);

double wrap_angle(double a);

// Absolute/relative stacking sigma = J_sigma x.
//   rows [0, p):              centroid, (1/N) [I ... I]
//   rows [p + k p, p + (k+1) p): x_{k+2} - x_{k+1}  (k = 0 .. N-2)
struct TaskGeometry {
  std::size_t robots = 1;
  std::size_t p = 3;
  Eigen::MatrixXd j_sigma;
  Eigen::MatrixXd j_sigma_inv;

  std::size_t m() const { return robots * p; }
  Eigen::MatrixXd selection(std::size_t i) const;  // Gamma_i, p x m
};

TaskGeometry build_task_geometry(std::size_t robots, std::size_t p);

Eigen::VectorXd task_value(const TaskGeometry& geometry, const Eigen::VectorXd& x);

struct GainsConfig {
  double k_sigma = 20.0;
  double lambda_sigma = 100.0;
  double k_n = 1.0;
  double k_damp = 2.0;
  double lambda_dls = 0.0;

  bool operator==(const GainsConfig& other) const = default;
};

// Reference trajectory sample handed to the controller for one tick.
//   sigma_ddot_r = dsigma_ds * s_ddot_r + accel_offset
// Along the nominal path accel_offset = d2sigma_ds2 * s_dot_r^2; during path
// deformation dsigma_ds = 0 and accel_offset is the impedance acceleration.
struct ReferenceSample {
  Eigen::VectorXd sigma;
  Eigen::VectorXd sigma_dot;
  Eigen::VectorXd sigma_ddot;
  Eigen::VectorXd dsigma_ds;
  Eigen::VectorXd d2sigma_ds2;
  Eigen::VectorXd accel_offset;
  double s_r = 0.0;
  double s_r_dot = 0.0;
  bool clamped = false;
};

struct TaskState {
  Eigen::VectorXd sigma;
  Eigen::VectorXd sigma_dot;
  Eigen::VectorXd sigma_r;
  Eigen::VectorXd sigma_r_dot;
  Eigen::VectorXd sigma_r_ddot;
  Eigen::VectorXd sigma_tilde;
  Eigen::VectorXd sigma_tilde_dot;
};

// Recomputes tracking errors from the measured team configuration. Errors are
// never integrated.
TaskState make_task_state(const TaskLayout& layout, const TaskGeometry& geometry,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& x_dot,
                          const ReferenceSample& reference);

// Per-robot quantities reused by the CLIK law, the null-space law and the
// safety derivative coefficients.
struct RobotTerms {
  Eigen::MatrixXd jacobian;
  Eigen::MatrixXd jacobian_pinv;
  Eigen::VectorXd jdot_qdot;
  Eigen::VectorXd x;
  Eigen::VectorXd x_dot;
};

RobotTerms robot_terms(const RobotModel& model, const JointState& state, TaskSpace space,
                       double lambda_dls);

// sigma_ddot_r + k_sigma * sigma_tilde_dot + lambda_sigma * sigma_tilde
Eigen::VectorXd task_feedback(const TaskState& task, const GainsConfig& gains);

// y_i = J_i^+ (Gamma_i J_sigma^-1 (sigma_ddot_r + k e_dot + lambda e) - Jdot_i qdot_i) + qdd_null
Eigen::VectorXd clik_acceleration(const TaskGeometry& geometry, std::size_t i,
                                  const RobotTerms& terms, const TaskState& task,
                                  const GainsConfig& gains, const Eigen::VectorXd& qdd_null);

// Convenience overload that evaluates the robot terms itself.
Eigen::VectorXd clik_acceleration(const TaskGeometry& geometry, std::size_t i,
                                  const RobotModel& model, const JointState& state,
                                  TaskSpace space, const TaskState& task,
                                  const GainsConfig& gains, const Eigen::VectorXd& qdd_null);

// The CLIK command written as y_i = slope * s_ddot_r + offset, where s_ddot_r
// enters only through sigma_ddot_r = dsigma_ds * s_ddot_r + accel_offset.
struct AffineCommand {
  Eigen::VectorXd slope;
  Eigen::VectorXd offset;

  Eigen::VectorXd at(double s_ddot_r) const { return slope * s_ddot_r + offset; }
};

AffineCommand clik_affine(const TaskGeometry& geometry, std::size_t i, const RobotTerms& terms,
                          const TaskState& task, const GainsConfig& gains,
                          const ReferenceSample& reference, const Eigen::VectorXd& qdd_null);

// (I - J^+ J)(k_n * grad - k_damp * qdot): damped gradient ascent projected
// onto the task null space.
Eigen::VectorXd nullspace_acceleration(const RobotTerms& terms, const Eigen::VectorXd& q_dot,
                                       const Eigen::VectorXd& gradient, const GainsConfig& gains);

}  // namespace coopsafe
