#include "coopsafe/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coopsafe/errors.hpp"

namespace coopsafe {
namespace {

constexpr double kOperatorGradStep = 1e-5;
constexpr double kJointGradStep = 1e-6;
// Above the round-off of the central difference for F up to ~1e3.
constexpr double kDegenerateGradient = 1e-8;

void check_team(std::span<const RobotModel> models, std::span<const JointState> states) {
  if (models.size() != states.size()) {
    throw ContractViolation("team snapshot has " + std::to_string(models.size()) +
                            " models but " + std::to_string(states.size()) + " joint states");
  }
}

}  // namespace

void SafetyFunctionParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw ContractViolation("safety gains k1, k2 must be positive");
  if (quadrature_nodes < 3 || quadrature_nodes % 2 == 0) {
    throw ContractViolation("quadrature node count must be odd and >= 3");
  }
  if (!(eps_d > 0.0)) throw ContractViolation("distance clamp eps_d must be positive");
}

PointSafety evaluate_point(const Eigen::Vector3d& p, const Eigen::Vector3d& p_dot,
                           const OperatorState& op, const SafetyFunctionParams& params) {
  PointSafety out;
  const Eigen::Vector3d diff = p - op.p;
  out.d = std::max(diff.norm(), params.eps_d);
  out.beta1 = diff / out.d;
  out.d_dot = out.beta1.dot(p_dot - op.p_dot);
  out.f = params.k1 * out.d + params.k2 * std::tanh(out.d_dot);
  return out;
}

double pointwise_safety(const Eigen::Vector3d& p, const Eigen::Vector3d& p_dot,
                        const OperatorState& op, const SafetyFunctionParams& params) {
  return evaluate_point(p, p_dot, op, params).f;
}

std::vector<double> simpson_weights(int nodes) {
  if (nodes < 3 || nodes % 2 == 0) {
    throw ContractViolation("Simpson quadrature needs an odd node count >= 3, got " +
                            std::to_string(nodes));
  }
  const double h = 1.0 / static_cast<double>(nodes - 1);
  std::vector<double> w(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double c = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    w[static_cast<std::size_t>(k)] = c * h / 3.0;
  }
  return w;
}

namespace {

double integrate_segment(const SegmentState& seg, const OperatorState& op,
                         const SafetyFunctionParams& params, std::span<const double> weights) {
  const double h = 1.0 / static_cast<double>(weights.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double r = static_cast<double>(k) * h;
    total += weights[k] * pointwise_safety(seg.point(r), seg.velocity(r), op, params);
  }
  return total;
}

}  // namespace

double link_safety(const SegmentState& segment, const OperatorState& op,
                   const SafetyFunctionParams& params) {
  const std::vector<double> w = simpson_weights(params.quadrature_nodes);
  return integrate_segment(segment, op, params, w);
}

double link_safety(const RobotModel& model, const JointState& state, std::size_t l,
                   const OperatorState& op, const SafetyFunctionParams& params) {
  if (l >= model.segment_count()) {
    throw ContractViolation("link index " + std::to_string(l) + " out of range");
  }
  return link_safety(segment_states(model, state)[l], op, params);
}

double robot_safety(std::span<const SegmentState> segments, const OperatorState& op,
                    const SafetyFunctionParams& params) {
  const std::vector<double> w = simpson_weights(params.quadrature_nodes);
  double total = 0.0;
  for (const SegmentState& seg : segments) total += integrate_segment(seg, op, params, w);
  return total;
}

double robot_safety(const RobotModel& model, const JointState& state, const OperatorState& op,
                    const SafetyFunctionParams& params) {
  return robot_safety(segment_states(model, state), op, params);
}

double point_segment_distance(const Eigen::Vector3d& point, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (point - a).norm();
  const double t = std::clamp((point - a).dot(ab) / len2, 0.0, 1.0);
  return (point - (a + t * ab)).norm();
}

SafetyReport team_safety(std::span<const RobotModel> models, std::span<const JointState> states,
                         const OperatorState& op, const SafetyFunctionParams& params) {
  check_team(models, states);
  SafetyReport report;
  report.F_i.reserve(models.size());
  report.d_actual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::vector<SegmentState> segs = segment_states(models[i], states[i]);
    const double fi = robot_safety(segs, op, params);
    report.F_i.push_back(fi);
    for (const SegmentState& s : segs) {
      report.d_actual = std::min(report.d_actual, point_segment_distance(op.p, s.p0, s.p1));
    }
  }
  report.F = 0.0;
  for (double fi : report.F_i) report.F += fi;
  return report;
}

std::pair<double, double> robot_derivative_coefficients(
    std::span<const SegmentState> segments, std::span<const SegmentJacobians> jacobians,
    const OperatorState& op, const AffineCommand& command, const SafetyFunctionParams& params) {
  if (segments.size() != jacobians.size()) {
    throw ContractViolation("segment state / Jacobian count mismatch");
  }
  const std::vector<double> w = simpson_weights(params.quadrature_nodes);
  const double h = 1.0 / static_cast<double>(w.size() - 1);
  double mu1 = 0.0;
  double mu2 = 0.0;
  for (std::size_t l = 0; l < segments.size(); ++l) {
    const SegmentState& seg = segments[l];
    const SegmentJacobians& jac = jacobians[l];
    // Point accelerations are affine in r: p_ddot(r) = gamma1(r) s_ddot_r + gamma2(r).
    const Eigen::Vector3d g1_0 = jac.j0 * command.slope;
    const Eigen::Vector3d g1_1 = jac.j1 * command.slope;
    const Eigen::Vector3d g2_0 = jac.j0 * command.offset + jac.jdot_qdot0;
    const Eigen::Vector3d g2_1 = jac.j1 * command.offset + jac.jdot_qdot1;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double r = static_cast<double>(k) * h;
      const PointSafety ps = evaluate_point(seg.point(r), seg.velocity(r), op, params);
      const Eigen::Vector3d rel_v = seg.velocity(r) - op.p_dot;
      const double beta2 = -ps.beta1.dot(op.p_ddot) +
                           (rel_v.squaredNorm() - ps.d_dot * ps.d_dot) / ps.d;
      const Eigen::Vector3d gamma1 = g1_0 + r * (g1_1 - g1_0);
      const Eigen::Vector3d gamma2 = g2_0 + r * (g2_1 - g2_0);
      const double th = std::tanh(ps.d_dot);
      const double dalpha2 = params.k2 * (1.0 - th * th);
      const double dalpha1 = params.k1;
      const double lambda1 = ps.beta1.dot(gamma1) * dalpha2;
      const double lambda2 = (ps.beta1.dot(gamma2) + beta2) * dalpha2 + dalpha1 * ps.d_dot;
      mu1 += w[k] * lambda1;
      mu2 += w[k] * lambda2;
    }
  }
  return {mu1, mu2};
}

DerivativeCoefficients derivative_coefficients(std::span<const RobotModel> models,
                                               std::span<const JointState> states,
                                               const OperatorState& op,
                                               std::span<const AffineCommand> commands,
                                               double s_ddot_n,
                                               const SafetyFunctionParams& params) {
  check_team(models, states);
  if (commands.size() != models.size()) {
    throw ContractViolation("one affine command per robot is required");
  }
  DerivativeCoefficients out;
  double sum1 = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto segs = segment_states(models[i], states[i]);
    const auto jacs = segment_jacobians(models[i], states[i]);
    const auto [m1, m2] = robot_derivative_coefficients(segs, jacs, op, commands[i], params);
    out.mu1_i.push_back(m1);
    out.mu2_i.push_back(m2);
    sum1 += m1;
    sum2 += m2;
  }
  out.mu1 = sum1;
  out.mu2 = s_ddot_n * sum1 + sum2;
  return out;
}

OperatorGradient safety_gradient_operator(std::span<const RobotModel> models,
                                          std::span<const JointState> states,
                                          const OperatorState& op,
                                          const SafetyFunctionParams& params) {
  check_team(models, states);
  std::vector<std::vector<SegmentState>> segs;
  segs.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) segs.push_back(segment_states(models[i], states[i]));
  auto team_value = [&](const OperatorState& o) {
    double total = 0.0;
    for (const auto& s : segs) total += robot_safety(s, o, params);
    return total;
  };
  OperatorGradient out;
  for (int axis = 0; axis < 3; ++axis) {
    OperatorState plus = op;
    OperatorState minus = op;
    plus.p(axis) += kOperatorGradStep;
    minus.p(axis) -= kOperatorGradStep;
    out.gradient(axis) = (team_value(plus) - team_value(minus)) / (2.0 * kOperatorGradStep);
  }
  out.degenerate = out.gradient.norm() < kDegenerateGradient;
  return out;
}

Eigen::VectorXd safety_gradient_joints(const RobotModel& model, const JointState& state,
                                       const OperatorState& op,
                                       const SafetyFunctionParams& params) {
  check_joint_state(model, state);
  const Eigen::Index n = state.q.size();
  Eigen::VectorXd grad(n);
  JointState probe = state;
  for (Eigen::Index k = 0; k < n; ++k) {
    probe.q(k) = state.q(k) + kJointGradStep;
    const double plus = robot_safety(model, probe, op, params);
    probe.q(k) = state.q(k) - kJointGradStep;
    const double minus = robot_safety(model, probe, op, params);
    probe.q(k) = state.q(k);
    grad(k) = (plus - minus) / (2.0 * kJointGradStep);
  }
  return grad;
}

double f_min_single(std::size_t links, double length, const SafetyFunctionParams& params,
                    double d_min) {
  if (!(d_min > 0.0)) throw ContractViolation("d_min must be positive");
  const auto n = static_cast<double>(links);
  return params.k1 * ((2.0 * n + 1.0) / 2.0 * length + n * d_min) + params.k2 * n;
}

double f_min_team(std::span<const LinkBudget> robots, const SafetyFunctionParams& params,
                  double d_min) {
  if (!(d_min > 0.0)) throw ContractViolation("d_min must be positive");
  double l_max = 0.0;
  for (const LinkBudget& r : robots) l_max = std::max(l_max, r.length);
  double total = 0.0;
  for (const LinkBudget& r : robots) {
    const auto n = static_cast<double>(r.links);
    total += params.k1 * ((2.0 * n + 3.0) / 2.0 * r.length + (n + 1.0) * (l_max + d_min)) +
             params.k2 * (n + 1.0);
  }
  return total;
}

double compute_f_min(std::span<const RobotModel> models, const SafetyFunctionParams& params,
                     double d_min) {
  std::vector<LinkBudget> budget;
  budget.reserve(models.size());
  for (const RobotModel& m : models) budget.push_back({m.link_count(), m.total_length()});
  return f_min_team(budget, params, d_min);
}

double compute_f_min_single(const RobotModel& model, const SafetyFunctionParams& params,
                            double d_min) {
  return f_min_single(model.segment_count(), model.total_length(), params, d_min);
}

}  // namespace coopsafe
