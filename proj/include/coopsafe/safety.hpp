#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "coopsafe/kinematics.hpp"
#include "coopsafe/task.hpp"

namespace coopsafe {

// Pointwise index f = k1 * d + k2 * tanh(d_dot). alpha_1 = k1 d is
// non-negative and increasing in d; alpha_2 = k2 tanh(d_dot) is increasing in
// d_dot with supremum k2 and non-vanishing slope for finite d_dot.
struct SafetyFunctionParams {
  double k1 = 1.0;
  double k2 = 1.0;
  int quadrature_nodes = 21;  // composite Simpson, odd and >= 3
  double eps_d = 1e-6;        // distance clamp

  void validate() const;
  bool operator==(const SafetyFunctionParams& other) const = default;
};

enum class OperatorSource { kScripted, kExternal };

struct OperatorState {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_dot = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_ddot = Eigen::Vector3d::Zero();
  OperatorSource source = OperatorSource::kScripted;
};

struct SafetyConfig {
  double f_min = 80.0;
  std::optional<double> d_min;  // set when f_min was derived from a distance
  double eps_f_rel = 1e-3;      // floor band eps_F = eps_f_rel * f_min
  double eps_mu = 1e-8;         // |mu1| below this cannot influence F_dot

  double eps_f() const { return eps_f_rel * f_min; }
  bool operator==(const SafetyConfig& other) const = default;
};

struct PointSafety {
  double d = 0.0;      // clamped distance
  double d_dot = 0.0;
  double f = 0.0;
  Eigen::Vector3d beta1 = Eigen::Vector3d::Zero();  // unit vector operator -> point
};

PointSafety evaluate_point(const Eigen::Vector3d& p, const Eigen::Vector3d& p_dot,
                           const OperatorState& op, const SafetyFunctionParams& params);

double pointwise_safety(const Eigen::Vector3d& p, const Eigen::Vector3d& p_dot,
                        const OperatorState& op, const SafetyFunctionParams& params);

// Composite Simpson weights on [0, 1] for an odd node count >= 3.
std::vector<double> simpson_weights(int nodes);

double link_safety(const SegmentState& segment, const OperatorState& op,
                   const SafetyFunctionParams& params);
double link_safety(const RobotModel& model, const JointState& state, std::size_t l,
                   const OperatorState& op, const SafetyFunctionParams& params);

// F^i = sum of link_safety over all segments including the virtual link.
double robot_safety(std::span<const SegmentState> segments, const OperatorState& op,
                    const SafetyFunctionParams& params);
double robot_safety(const RobotModel& model, const JointState& state, const OperatorState& op,
                    const SafetyFunctionParams& params);

// Exact Euclidean distance between a point and a segment.
double point_segment_distance(const Eigen::Vector3d& point, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b);

struct SafetyReport {
  double F = 0.0;
  std::vector<double> F_i;
  double mu1 = 0.0;
  double mu2 = 0.0;
  std::vector<double> mu1_i;
  std::vector<double> mu2_i;
  Eigen::Vector3d grad_F_po = Eigen::Vector3d::Zero();
  bool grad_degenerate = true;
  double d_actual = 0.0;  // min over every structure point of |p - p_o|
};

// F, F^i and the minimum operator distance for a consistent team snapshot.
SafetyReport team_safety(std::span<const RobotModel> models, std::span<const JointState> states,
                         const OperatorState& op, const SafetyFunctionParams& params);

struct DerivativeCoefficients {
  double mu1 = 0.0;  // team: F_dot = mu1 * delta_s_ddot + mu2
  double mu2 = 0.0;
  std::vector<double> mu1_i;  // per robot: F^i_dot = mu1_i * s_ddot_r + mu2_i
  std::vector<double> mu2_i;
};

// Per-robot coefficients of F^i_dot = mu1_i * s_ddot_r + mu2_i when robot i
// applies the command y_i = command.slope * s_ddot_r + command.offset.
std::pair<double, double> robot_derivative_coefficients(std::span<const SegmentState> segments,
                                                        std::span<const SegmentJacobians> jacobians,
                                                        const OperatorState& op,
                                                        const AffineCommand& command,
                                                        const SafetyFunctionParams& params);

// Team coefficients; mu2 folds in the nominal path acceleration:
// mu1 = sum mu1_i, mu2 = s_ddot_n * sum mu1_i + sum mu2_i.
DerivativeCoefficients derivative_coefficients(std::span<const RobotModel> models,
                                               std::span<const JointState> states,
                                               const OperatorState& op,
                                               std::span<const AffineCommand> commands,
                                               double s_ddot_n,
                                               const SafetyFunctionParams& params);

struct OperatorGradient {
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  bool degenerate = true;  // |gradient| < 1e-8
};

// dF/dp_o by central differences (step 1e-5 m), operator velocity frozen.
OperatorGradient safety_gradient_operator(std::span<const RobotModel> models,
                                          std::span<const JointState> states,
                                          const OperatorState& op,
                                          const SafetyFunctionParams& params);

// dF^i/dq_i by central differences (step 1e-6), joint velocities frozen.
Eigen::VectorXd safety_gradient_joints(const RobotModel& model, const JointState& state,
                                       const OperatorState& op,
                                       const SafetyFunctionParams& params);

// Lower bound on F guaranteeing d >= d_min for a single chain of `links`
// summed segments with total length `length`:
//   k1 ((2 n + 1) / 2 L + n d_min) + k2 n
double f_min_single(std::size_t links, double length, const SafetyFunctionParams& params,
                    double d_min);

struct LinkBudget {
  std::size_t links = 0;  // n_l^i, physical links (the virtual link is added by the formula)
  double length = 0.0;    // L^i, including the virtual link
};

// Team bound: sum_i [k1 ((2 n_i + 3) / 2 L_i + (n_i + 1)(L_max + d_min)) + k2 (n_i + 1)].
double f_min_team(std::span<const LinkBudget> robots, const SafetyFunctionParams& params,
                  double d_min);

double compute_f_min(std::span<const RobotModel> models, const SafetyFunctionParams& params,
                     double d_min);
// Single-robot variant with n_l counting every summed segment of the model.
double compute_f_min_single(const RobotModel& model, const SafetyFunctionParams& params,
                            double d_min);

}  // namespace coopsafe
