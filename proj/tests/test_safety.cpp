#include <gtest/gtest.h>

#include <cmath>

#include "coopsafe/errors.hpp"
#include "coopsafe/safety.hpp"
#include "coopsafe/scenario.hpp"
#include "support.hpp"

namespace coopsafe {
namespace {

using testing::planar_arm;
using testing::random_spatial_arm;
using testing::random_state;
using testing::random_vector;

OperatorState static_operator(const Eigen::Vector3d& p) {
  OperatorState op;
  op.p = p;
  return op;
}

SafetyFunctionParams params(double k1, double k2, int nodes = 21) {
  SafetyFunctionParams p;
  p.k1 = k1;
  p.k2 = k2;
  p.quadrature_nodes = nodes;
  return p;
}

// Robot without joints whose only (virtual) segment collapses onto its base.
RobotModel point_robot(const Eigen::Vector3d& at) {
  RobotModel m;
  m.name = "point";
  m.base_pose.xyz = at;
  return m;
}

TEST(PointSafety, StaticDistance) {
  const OperatorState op = static_operator(Eigen::Vector3d::Zero());
  EXPECT_DOUBLE_EQ(pointwise_safety(Eigen::Vector3d(0, 2, 0), Eigen::Vector3d::Zero(), op, params(1, 1)), 2.0);
}

TEST(PointSafety, ApproachingPoint) {
  const OperatorState op = static_operator(Eigen::Vector3d::Zero());
  const double f = pointwise_safety(Eigen::Vector3d(1.5, 0, 0), Eigen::Vector3d(-0.5, 0, 0), op, params(2, 3));
  EXPECT_NEAR(f, 3.0 + 3.0 * std::tanh(-0.5), 1e-15);
  EXPECT_NEAR(f, 1.61364, 1e-5);
}

TEST(PointSafety, VelocityTermSaturates) {
  const OperatorState op = static_operator(Eigen::Vector3d::Zero());
  const double f = pointwise_safety(Eigen::Vector3d(1.0, 0, 0), Eigen::Vector3d(1e6, 0, 0), op, params(1, 0.7));
  EXPECT_NEAR(f, 1.0 + 0.7, 1e-12);
}

TEST(PointSafety, MonotoneInDistanceAndRate) {
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> d(0.01, 5.0), v(-4.0, 4.0);
  const OperatorState op = static_operator(Eigen::Vector3d::Zero());
  const SafetyFunctionParams p = params(1.3, 0.8);
  for (int k = 0; k < 500; ++k) {
    const double d0 = d(rng), v0 = v(rng);
    auto f = [&](double dd, double vv) {
      return pointwise_safety(Eigen::Vector3d(dd, 0, 0), Eigen::Vector3d(vv, 0, 0), op, p);
    };
    EXPECT_GT(f(d0 + 1e-3, v0), f(d0, v0));
    EXPECT_GT(f(d0, v0 + 1e-3), f(d0, v0));
    EXPECT_LT(f(d0, v0) - 1.3 * d0, 0.8);
  }
}

TEST(Simpson, WeightsIntegrateCubicsExactly) {
  const std::vector<double> w = simpson_weights(21);
  double sum = 0.0, cubic = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double r = static_cast<double>(k) / 20.0;
    sum += w[k];
    cubic += w[k] * r * r * r;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(cubic, 0.25, 1e-15);
  EXPECT_THROW(params(1, 1, 20).validate(), ContractViolation);
}

TEST(LinkSafety, ClosedFormArcIntegral) {
  SegmentState seg;
  seg.p1 = Eigen::Vector3d(1, 0, 0);
  const OperatorState op = static_operator(Eigen::Vector3d(0.5, 0, 1));
  // 2 * integral_0^0.5 sqrt(u^2 + 1) du
  const double exact = 0.5 * std::sqrt(1.25) + std::asinh(0.5);
  EXPECT_NEAR(exact, 1.0402288, 1e-7);
  EXPECT_NEAR(link_safety(seg, op, params(1, 1)), exact, 1e-7);
}

TEST(LinkSafety, BoundedByExtremeDistances) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    SegmentState seg;
    seg.p0 = random_vector(rng, 3, 2.0);
    seg.p1 = random_vector(rng, 3, 2.0);
    const OperatorState op = static_operator(random_vector(rng, 3, 3.0));
    const double fl = link_safety(seg, op, params(1, 1));
    const double dmin = point_segment_distance(op.p, seg.p0, seg.p1);
    const double dmax = std::max((seg.p0 - op.p).norm(), (seg.p1 - op.p).norm());
    EXPECT_GE(fl, dmin - 1e-12);
    EXPECT_LE(fl, dmax + 1e-12);
  }
}

TEST(LinkSafety, CoarseQuadratureMatchesDenseReference) {
  std::mt19937_64 rng(22);
  const Scenario sc = load_scenario(testing::scenario_path("desk_cell.json"));
  for (int k = 0; k < 20; ++k) {
    const RobotModel& m = sc.robots[static_cast<std::size_t>(k) % 3];
    const JointState s = random_state(rng, m, 2.0, 1.0);
    OperatorState op = static_operator(random_vector(rng, 3, 3.0));
    op.p.z() = 1.3;
    op.p_dot = random_vector(rng, 3, 1.0);
    for (std::size_t l = 0; l < m.segment_count(); ++l) {
      const double coarse = link_safety(m, s, l, op, params(1, 1, 21));
      const double dense = link_safety(m, s, l, op, params(1, 1, 10001));
      EXPECT_LE(std::abs(coarse - dense), 1e-6 * std::abs(dense));
    }
  }
}

TEST(RobotSafety, SumsVirtualLink) {
  const RobotModel m = planar_arm({0.8}, 0.5);
  const JointState s{Eigen::VectorXd::Constant(1, 0.4), Eigen::VectorXd::Constant(1, 0.3)};
  const OperatorState op = static_operator(Eigen::Vector3d(1, 1, 0.5));
  const SafetyFunctionParams p = params(1, 1);
  EXPECT_NEAR(robot_safety(m, s, op, p), link_safety(m, s, 0, op, p) + link_safety(m, s, 1, op, p), 1e-14);
}

TEST(RobotSafety, DuplicatedLinkAddsItsValue) {
  const OperatorState op = static_operator(Eigen::Vector3d(0.3, 1.2, 0.4));
  const SafetyFunctionParams p = params(1, 1);
  std::mt19937_64 rng(23);
  const RobotModel m = random_spatial_arm(rng, 3);
  const JointState s = random_state(rng, m);
  std::vector<SegmentState> segs = segment_states(m, s);
  const double base = robot_safety(segs, op, p);
  segs.push_back(segs[1]);
  EXPECT_NEAR(robot_safety(segs, op, p) - base, link_safety(segs[1], op, p), 1e-12);
}

TEST(RobotSafety, MatchesPerLinkRecomputation) {
  std::mt19937_64 rng(24);
  const SafetyFunctionParams p = params(1.5, 0.7);
  for (int k = 0; k < 20; ++k) {
    const RobotModel m = random_spatial_arm(rng, 2 + k % 4);
    const JointState s = random_state(rng, m);
    OperatorState op = static_operator(random_vector(rng, 3, 2.0));
    op.p_dot = random_vector(rng, 3);
    double oracle = 0.0;
    for (std::size_t l = 0; l < m.segment_count(); ++l) {
      // Simpson by hand over point_on_link samples.
      const double h = 1.0 / 20.0;
      double acc = 0.0;
      for (int n = 0; n <= 20; ++n) {
        const double w = (n == 0 || n == 20) ? 1.0 : (n % 2 ? 4.0 : 2.0);
        const LinkPoint pt = point_on_link(m, s, l, n * h);
        acc += w * pointwise_safety(pt.p, pt.p_dot, op, p);
      }
      oracle += acc * h / 3.0;
    }
    EXPECT_NEAR(robot_safety(m, s, op, p), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST(TeamSafety, SingleRobotAndTwins) {
  std::mt19937_64 rng(25);
  const RobotModel m = random_spatial_arm(rng, 3);
  const JointState s = random_state(rng, m);
  const OperatorState op = static_operator(Eigen::Vector3d(1, 2, 0.5));
  const SafetyFunctionParams p = params(1, 1);
  const double f1 = robot_safety(m, s, op, p);
  const std::vector<RobotModel> one{m};
  const std::vector<JointState> one_s{s};
  EXPECT_NEAR(team_safety(one, one_s, op, p).F, f1, 1e-14);
  const std::vector<RobotModel> twins{m, m};
  const std::vector<JointState> twin_s{s, s};
  EXPECT_NEAR(team_safety(twins, twin_s, op, p).F, 2.0 * f1, 1e-12);
}

TEST(TeamSafety, SumAndMinimumDistance) {
  std::mt19937_64 rng(26);
  const SafetyFunctionParams p = params(1, 1);
  for (int k = 0; k < 10; ++k) {
    std::vector<RobotModel> team;
    std::vector<JointState> states;
    for (int i = 0; i < 3; ++i) {
      team.push_back(random_spatial_arm(rng, 3));
      states.push_back(random_state(rng, team.back()));
    }
    const OperatorState op = static_operator(random_vector(rng, 3, 2.0));
    const SafetyReport rep = team_safety(team, states, op, p);
    double sum = 0.0, dmin = 1e300;
    for (std::size_t i = 0; i < team.size(); ++i) {
      sum += robot_safety(team[i], states[i], op, p);
      for (const SegmentState& seg : segment_states(team[i], states[i])) {
        dmin = std::min(dmin, point_segment_distance(op.p, seg.p0, seg.p1));
      }
    }
    EXPECT_NEAR(rep.F, sum, 1e-12 * sum);
    EXPECT_NEAR(rep.d_actual, dmin, 1e-12);
  }
}

TEST(PointSegmentDistance, Cases) {
  const Eigen::Vector3d a(0, 0, 0), b(2, 0, 0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Eigen::Vector3d(1, 1, 0), a, b), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Eigen::Vector3d(-3, 4, 0), a, b), 5.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Eigen::Vector3d(1, 1, 0), a, a), std::sqrt(2.0));
}

// F_dot from propagating every robot and the operator over +-h under the
// commanded accelerations.
double propagated_rate(std::span<const RobotModel> team, std::span<const JointState> states,
                       const OperatorState& op, std::span<const AffineCommand> commands,
                       double s_ddot_r, const SafetyFunctionParams& p, double h) {
  double f[2];
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    std::vector<JointState> moved;
    for (std::size_t i = 0; i < team.size(); ++i) {
      const Eigen::VectorXd y = commands[i].at(s_ddot_r);
      moved.push_back({states[i].q + sign * h * states[i].q_dot + 0.5 * h * h * y,
                       states[i].q_dot + sign * h * y});
    }
    OperatorState o = op;
    o.p = op.p + sign * h * op.p_dot + 0.5 * h * h * op.p_ddot;
    o.p_dot = op.p_dot + sign * h * op.p_ddot;
    f[side] = team_safety(team, moved, o, p).F;
  }
  return (f[0] - f[1]) / (2 * h);
}

TEST(DerivativeCoefficients, StationaryTeamHasNoDrift) {
  const Scenario sc = load_scenario(testing::scenario_path("desk_cell.json"));
  std::vector<JointState> states;
  std::vector<AffineCommand> commands;
  std::mt19937_64 rng(27);
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    states.push_back({sc.q0[i], Eigen::VectorXd::Zero(sc.q0[i].size())});
    commands.push_back({random_vector(rng, sc.q0[i].size()), Eigen::VectorXd::Zero(sc.q0[i].size())});
  }
  const OperatorState op = static_operator(Eigen::Vector3d(1.5, 0.5, 1.3));
  const DerivativeCoefficients c =
      derivative_coefficients(sc.robots, states, op, commands, 0.0, sc.safety_params);
  EXPECT_NEAR(c.mu2, 0.0, 1e-12);
  const double rate = propagated_rate(sc.robots, states, op, commands, 0.7, sc.safety_params, 1e-5);
  EXPECT_NEAR(rate, c.mu1 * 0.7, 1e-3 * std::max(1.0, std::abs(rate)));
}

TEST(DerivativeCoefficients, TeamAssembly) {
  const Scenario sc = load_scenario(testing::scenario_path("desk_cell.json"));
  std::mt19937_64 rng(28);
  std::vector<JointState> states;
  std::vector<AffineCommand> commands;
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    const auto n = sc.q0[i].size();
    states.push_back({sc.q0[i] + random_vector(rng, n, 0.2), random_vector(rng, n, 0.5)});
    commands.push_back({random_vector(rng, n), random_vector(rng, n)});
  }
  OperatorState op = static_operator(Eigen::Vector3d(1.5, 0.5, 1.3));
  op.p_dot = random_vector(rng, 3);
  for (double s_ddot_n : {0.0, 0.3}) {
    const DerivativeCoefficients c =
        derivative_coefficients(sc.robots, states, op, commands, s_ddot_n, sc.safety_params);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < c.mu1_i.size(); ++i) {
      m1 += c.mu1_i[i];
      m2 += c.mu2_i[i];
    }
    EXPECT_NEAR(c.mu1, m1, 1e-12 * std::abs(m1));
    EXPECT_NEAR(c.mu2, s_ddot_n * m1 + m2, 1e-10);
  }
}

TEST(DerivativeCoefficients, MatchesPropagation) {
  const Scenario sc = load_scenario(testing::scenario_path("desk_cell.json"));
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<JointState> states;
    std::vector<AffineCommand> commands;
    for (std::size_t i = 0; i < sc.robots.size(); ++i) {
      const auto n = sc.q0[i].size();
      states.push_back({sc.q0[i] + random_vector(rng, n, 0.5), random_vector(rng, n, 0.8)});
      commands.push_back({random_vector(rng, n, 2.0), random_vector(rng, n, 2.0)});
    }
    OperatorState op = static_operator(random_vector(rng, 3, 2.0));
    op.p.z() = 1.3;
    op.p_dot = random_vector(rng, 3);
    op.p_ddot = random_vector(rng, 3);
    const double s_ddot_n = random_vector(rng, 1, 0.1)(0);
    const double delta = random_vector(rng, 1, 1.0)(0);
    const DerivativeCoefficients c =
        derivative_coefficients(sc.robots, states, op, commands, s_ddot_n, sc.safety_params);
    const double rate =
        propagated_rate(sc.robots, states, op, commands, s_ddot_n + delta, sc.safety_params, 1e-5);
    EXPECT_LE(std::abs(rate - (c.mu1 * delta + c.mu2)) / std::max(1.0, std::abs(rate)), 1e-3);
  }
}

TEST(OperatorGradient, SinglePoint) {
  const std::vector<RobotModel> team{point_robot(Eigen::Vector3d::Zero())};
  const std::vector<JointState> states{{Eigen::VectorXd(0), Eigen::VectorXd(0)}};
  const OperatorGradient g =
      safety_gradient_operator(team, states, static_operator(Eigen::Vector3d(2, 0, 0)), params(1, 1));
  EXPECT_FALSE(g.degenerate);
  EXPECT_LT((g.gradient - Eigen::Vector3d(1, 0, 0)).norm(), 1e-8);
}

TEST(OperatorGradient, SymmetricArrangementCancels) {
  std::vector<RobotModel> team;
  std::vector<JointState> states;
  for (const Eigen::Vector3d& at : {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0), Eigen::Vector3d(0, 1, 0),
                                    Eigen::Vector3d(0, -1, 0), Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0, 0, -1)}) {
    team.push_back(point_robot(at));
    states.push_back({Eigen::VectorXd(0), Eigen::VectorXd(0)});
  }
  const OperatorGradient g =
      safety_gradient_operator(team, states, static_operator(Eigen::Vector3d::Zero()), params(1, 1));
  EXPECT_LT(g.gradient.norm(), 1e-8);
  EXPECT_TRUE(g.degenerate);
}

TEST(OperatorGradient, StepHalvingConsistent) {
  const Scenario sc = load_scenario(testing::scenario_path("desk_cell.json"));
  std::mt19937_64 rng(30);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<JointState> states;
    for (std::size_t i = 0; i < sc.robots.size(); ++i) {
      const auto n = sc.q0[i].size();
      states.push_back({sc.q0[i] + random_vector(rng, n, 0.3), random_vector(rng, n, 0.5)});
    }
    OperatorState op = static_operator(random_vector(rng, 3, 2.0));
    op.p.z() = 1.3;
    op.p_dot = random_vector(rng, 3);
    const Eigen::Vector3d g = safety_gradient_operator(sc.robots, states, op, sc.safety_params).gradient;
    auto fd = [&](double h) {
      Eigen::Vector3d out;
      for (int k = 0; k < 3; ++k) {
        OperatorState a = op, b = op;
        a.p(k) += h;
        b.p(k) -= h;
        out(k) = (team_safety(sc.robots, states, a, sc.safety_params).F -
                  team_safety(sc.robots, states, b, sc.safety_params).F) /
                 (2 * h);
      }
      return out;
    };
    const Eigen::Vector3d g1 = fd(2e-4), g2 = fd(1e-4);
    EXPECT_LT((g1 - g2).norm(), 1e-6);
    EXPECT_LT((g - g2).norm(), 1e-6);
  }
}

TEST(JointGradient, SymmetricOperatorOnAxis) {
  const RobotModel m = planar_arm({0.8}, 0.4);
  const JointState s{Eigen::VectorXd::Constant(1, 0.7), Eigen::VectorXd::Zero(1)};
  const Eigen::VectorXd g = safety_gradient_joints(m, s, static_operator(Eigen::Vector3d(0, 0, 1.5)), params(1, 1));
  EXPECT_LT(g.norm(), 1e-8);
}

TEST(JointGradient, AscentStepIncreasesSafety) {
  std::mt19937_64 rng(31);
  const SafetyFunctionParams p = params(1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = random_spatial_arm(rng, 4);
    const JointState s = random_state(rng, m);
    const OperatorState op = static_operator(random_vector(rng, 3, 1.5));
    const Eigen::VectorXd g = safety_gradient_joints(m, s, op, p);
    if (g.norm() < 1e-9) continue;
    const JointState moved{s.q + 1e-3 * g.normalized(), s.q_dot};
    EXPECT_GT(robot_safety(m, moved, op, p), robot_safety(m, s, op, p));
  }
}

TEST(JointGradient, FarFieldMatchesMeanDistanceGradient) {
  const RobotModel m = planar_arm({0.6, 0.4}, 0.3);
  const JointState s{Eigen::Vector2d(0.4, 0.9), Eigen::Vector2d::Zero()};
  const Eigen::Vector3d far(300.0, 200.0, 0.0);
  const Eigen::VectorXd g = safety_gradient_joints(m, s, static_operator(far), params(1, 0));
  // Far away, the distance of every point is its projection on -u with u the
  // unit vector towards the operator, so F = const - u . sum of mean points.
  const Eigen::Vector3d u = far.normalized();
  auto mean_projection = [&](const Eigen::VectorXd& q) {
    double acc = 0.0;
    for (const SegmentState& seg : segment_states(m, {q, Eigen::VectorXd::Zero(2)})) {
      acc += u.dot(0.5 * (seg.p0 + seg.p1));
    }
    return acc;
  };
  Eigen::Vector2d analytic;
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd qp = s.q, qm = s.q;
    qp(k) += 1e-6;
    qm(k) -= 1e-6;
    analytic(k) = -(mean_projection(qp) - mean_projection(qm)) / 2e-6;
  }
  EXPECT_LT((g - analytic).norm(), 1e-3 * analytic.norm());
}

TEST(FMin, SingleRobotFormula) {
  EXPECT_NEAR(f_min_single(2, 1.0, params(1, 0), 0.5), 3.5, 1e-15);
}

TEST(FMin, VelocityTermOnly) {
  std::vector<LinkBudget> budgets{{3, 2.0}, {2, 1.5}};
  EXPECT_NEAR(f_min_team(budgets, params(0, 1.5), 0.4), 1.5 * (4 + 3), 1e-15);
}

TEST(FMin, ThreeIdenticalRobots) {
  const Scenario sc = load_scenario(testing::data_path("three_arms.json"));
  for (const RobotModel& m : sc.robots) {
    EXPECT_EQ(m.link_count(), 3u);
    EXPECT_NEAR(m.total_length(), 2.0, 1e-15);
  }
  EXPECT_NEAR(compute_f_min(sc.robots, params(1, 1), 0.3), 66.6, 1e-12);
  EXPECT_NEAR(sc.safety.f_min, 66.6, 1e-12);
  EXPECT_THROW(compute_f_min(sc.robots, params(1, 1), 0.0), ContractViolation);
}

}  // namespace
}  // namespace coopsafe
