#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "coopsafe/errors.hpp"
#include "coopsafe/kinematics.hpp"
#include "support.hpp"

namespace coopsafe {
namespace {

using testing::planar_arm;
using testing::random_spatial_arm;
using testing::random_state;
using testing::random_vector;

TEST(ForwardKinematics, ZeroAnglesSumTranslations) {
  // Joint offsets 0, 0.4, 0.3 and the tool offset 0.1; the last link's own
  // geometry does not move the tool.
  const RobotModel m = planar_arm({0.4, 0.3, 0.2}, 0.1);
  const ForwardKinematics fk = forward_kinematics(m, Eigen::Vector3d::Zero());
  EXPECT_NEAR(fk.x(0), 0.4 + 0.3 + 0.1, 1e-15);
  EXPECT_NEAR(fk.x(1), 0.0, 1e-15);
  EXPECT_NEAR(fk.x(2), 0.0, 1e-15);
}

TEST(ForwardKinematics, QuarterTurn) {
  const RobotModel m = planar_arm({1.0}, 1.0);
  Eigen::VectorXd q(1);
  q << std::numbers::pi / 2;
  const ForwardKinematics fk = forward_kinematics(m, q);
  EXPECT_NEAR(fk.x(0), 0.0, 1e-15);
  EXPECT_NEAR(fk.x(1), 1.0, 1e-15);
}

TEST(ForwardKinematics, MatchesSymbolicPlanarChain) {
  const double l1 = 0.7, l2 = 0.5, l3 = 0.35;
  RobotModel m = planar_arm({l1, l2}, l3);
  m.base_pose.xyz = Eigen::Vector3d(0.2, -0.1, 0.8);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, 2, 3.0);
    const double a1 = q(0), a2 = q(0) + q(1);
    const double x = 0.2 + l1 * std::cos(a1) + l3 * std::cos(a2);
    const double y = -0.1 + l1 * std::sin(a1) + l3 * std::sin(a2);
    const ForwardKinematics fk = forward_kinematics(m, q);
    EXPECT_NEAR(fk.x(0), x, 1e-12);
    EXPECT_NEAR(fk.x(1), y, 1e-12);
    EXPECT_NEAR(fk.x(2), a2, 1e-12);
  }
  // Three joints with the tool on the last one.
  const RobotModel m3 = planar_arm({l1, l2, l3}, 0.25);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd q = random_vector(rng, 3, 3.0);
    const double a1 = q(0), a2 = a1 + q(1), a3 = a2 + q(2);
    const double x = l1 * std::cos(a1) + l2 * std::cos(a2) + 0.25 * std::cos(a3);
    const double y = l1 * std::sin(a1) + l2 * std::sin(a2) + 0.25 * std::sin(a3);
    const ForwardKinematics fk = forward_kinematics(m3, q);
    EXPECT_NEAR(fk.x(0), x, 1e-12);
    EXPECT_NEAR(fk.x(1), y, 1e-12);
    EXPECT_NEAR(fk.x(2), a3, 1e-12);
  }
}

TEST(ForwardKinematics, RejectsWrongJointCount) {
  const RobotModel m = planar_arm({1.0, 1.0}, 0.5);
  EXPECT_THROW(forward_kinematics(m, Eigen::VectorXd::Zero(3)), ContractViolation);
}

TEST(PointOnLink, EndpointsAndMidpoint) {
  std::mt19937_64 rng(2);
  const RobotModel m = random_spatial_arm(rng, 4);
  const JointState s = random_state(rng, m);
  const std::vector<SegmentState> segs = segment_states(m, s);
  for (std::size_t l = 0; l < m.segment_count(); ++l) {
    const LinkPoint p0 = point_on_link(m, s, l, 0.0);
    const LinkPoint p1 = point_on_link(m, s, l, 1.0);
    const LinkPoint pm = point_on_link(m, s, l, 0.5);
    EXPECT_LT((p0.p - segs[l].p0).norm(), 1e-14);
    EXPECT_LT((p0.p_dot - segs[l].v0).norm(), 1e-12);
    EXPECT_LT((p1.p - segs[l].p1).norm(), 1e-14);
    EXPECT_LT((pm.p - 0.5 * (p0.p + p1.p)).norm(), 1e-14);
  }
  EXPECT_THROW(point_on_link(m, s, 0, 1.5), ContractViolation);
  EXPECT_THROW(point_on_link(m, s, m.segment_count(), 0.5), ContractViolation);
}

TEST(PointOnLink, VirtualLinkEndsAtTool) {
  const RobotModel m = planar_arm({0.5, 0.4}, 0.3);
  const JointState s{Eigen::Vector2d(0.3, -0.7), Eigen::Vector2d::Zero()};
  const ForwardKinematics fk = forward_kinematics(m, s.q);
  const LinkPoint tip = point_on_link(m, s, m.virtual_link(), 1.0);
  EXPECT_LT((tip.p - fk.tool_frame.translation()).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(m.link_length(m.virtual_link()), 0.3);
  EXPECT_DOUBLE_EQ(m.total_length(), 1.2);
}

TEST(PointJacobian, ZeroVelocity) {
  std::mt19937_64 rng(3);
  const RobotModel m = random_spatial_arm(rng, 3);
  const JointState s = random_state(rng, m);
  const Eigen::Matrix3Xd j = point_jacobian(m, s.q, 1, 0.3);
  EXPECT_EQ((j * Eigen::VectorXd::Zero(j.cols())).norm(), 0.0);
}

TEST(PointJacobian, PlanarBaseColumns) {
  const RobotModel m = planar_arm({0.5, 0.4}, 0.3, BaseKind::kPlanarHolonomic);
  std::mt19937_64 rng(4);
  const JointState s = random_state(rng, m);
  for (std::size_t l = 0; l < m.segment_count(); ++l) {
    for (double r : {0.0, 0.37, 1.0}) {
      const Eigen::Matrix3Xd j = point_jacobian(m, s.q, l, r);
      EXPECT_EQ(j.col(0), Eigen::Vector3d::UnitX());
      EXPECT_EQ(j.col(1), Eigen::Vector3d::UnitY());
    }
  }
}

TEST(PointJacobian, MatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  const double delta = 1e-7;
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = random_spatial_arm(rng, 2 + trial % 4);
    const JointState s = random_state(rng, m);
    for (std::size_t l = 0; l < m.segment_count(); ++l) {
      const double r = 0.1 * static_cast<double>(trial % 11);
      const Eigen::Vector3d p = point_on_link(m, s, l, r).p;
      const JointState moved{s.q + delta * s.q_dot, s.q_dot};
      const Eigen::Vector3d fd = (point_on_link(m, moved, l, r).p - p) / delta;
      const Eigen::Vector3d jq = point_jacobian(m, s.q, l, r) * s.q_dot;
      EXPECT_LT((fd - jq).cwiseAbs().maxCoeff(), 1e-5);
    }
  }
}

TEST(PointJacobian, VelocityConsistency) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const RobotModel m = random_spatial_arm(rng, 1 + trial % 5);
    const JointState s = random_state(rng, m, 2.0, 3.0);
    for (std::size_t l = 0; l < m.segment_count(); ++l) {
      for (double r : {0.0, 0.25, 0.8, 1.0}) {
        const LinkPoint p = point_on_link(m, s, l, r);
        const Eigen::Vector3d jq = point_jacobian(m, s.q, l, r) * s.q_dot;
        EXPECT_LE((p.p_dot - jq).norm(), 1e-10 * (1.0 + s.q_dot.norm()));
      }
    }
  }
}

TEST(TaskJacobian, MatchesFiniteDifference) {
  std::mt19937_64 rng(7);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = random_spatial_arm(rng, 6);
    const JointState s = random_state(rng, m, 0.8);
    const Eigen::MatrixXd j = jacobian(m, s.q, TaskSpace::kSpatial);
    const Eigen::VectorXd xp = forward_kinematics(m, s.q + h * s.q_dot, TaskSpace::kSpatial).x;
    const Eigen::VectorXd xm = forward_kinematics(m, s.q - h * s.q_dot, TaskSpace::kSpatial).x;
    const Eigen::VectorXd fd = (xp - xm) / (2 * h);
    EXPECT_LT((fd - j * s.q_dot).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(JacobianDot, ZeroVelocity) {
  const RobotModel m = planar_arm({0.5, 0.4, 0.3}, 0.2);
  const JointState s{Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d::Zero()};
  EXPECT_EQ(jacobian_dot(m, s).norm(), 0.0);
}

TEST(JacobianDot, ConstantJacobianChain) {
  RobotModel m;
  m.base_kind = BaseKind::kPlanarHolonomic;
  const JointState s{Eigen::Vector2d(0.4, -1.0), Eigen::Vector2d(2.0, -3.0)};
  EXPECT_LT(jacobian_dot(m, s).norm(), 1e-12);
}

TEST(JacobianDot, MatchesSecondDifference) {
  std::mt19937_64 rng(8);
  const double h = 1e-4;
  for (int trial = 0; trial < 20; ++trial) {
    const RobotModel m = planar_arm({0.6, 0.5, 0.4}, 0.3, BaseKind::kPlanarHolonomic);
    const JointState s = random_state(rng, m, 2.0, 1.5);
    const Eigen::VectorXd x0 = forward_kinematics(m, s.q).x;
    const Eigen::VectorXd xp = forward_kinematics(m, s.q + h * s.q_dot).x;
    const Eigen::VectorXd xm = forward_kinematics(m, s.q - h * s.q_dot).x;
    const Eigen::VectorXd xdd = (xp - 2 * x0 + xm) / (h * h);
    EXPECT_LT((jacobian_dot(m, s) * s.q_dot - xdd).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(DampedPseudoinverse, Identity) {
  EXPECT_LT((damped_pseudoinverse(Eigen::Matrix3d::Identity(), 0.0) - Eigen::Matrix3d::Identity()).norm(),
            1e-15);
}

TEST(DampedPseudoinverse, Scalar) {
  Eigen::MatrixXd j(1, 1);
  j << 2.0;
  EXPECT_DOUBLE_EQ(damped_pseudoinverse(j, 0.0)(0, 0), 0.5);
}

TEST(DampedPseudoinverse, MatchesDenseSolve) {
  Eigen::MatrixXd j(2, 2);
  j << 1, 0, 0, 0;
  const double lambda = 0.1;
  // J^T X with (J J^T + lambda^2 I) X = I solved by Householder QR.
  const Eigen::MatrixXd a = j * j.transpose() + lambda * lambda * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd x = a.householderQr().solve(Eigen::MatrixXd::Identity(2, 2));
  const Eigen::MatrixXd oracle = j.transpose() * x;
  EXPECT_LT((damped_pseudoinverse(j, lambda) - oracle).norm(), 1e-14);
  EXPECT_NEAR(oracle(0, 0), 1.0 / 1.01, 1e-15);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(3, 5, [&] { return testing::random_vector(rng, 1)(0); });
    const Eigen::MatrixXd ww = w * w.transpose() + 0.04 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd ref = w.transpose() * ww.householderQr().solve(Eigen::MatrixXd::Identity(3, 3));
    EXPECT_LT((damped_pseudoinverse(w, 0.2) - ref).norm(), 1e-12);
    // Tall shape.
    const Eigen::MatrixXd t = w.transpose();
    const Eigen::MatrixXd tt = t.transpose() * t + 0.04 * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd ref_t = tt.householderQr().solve(t.transpose());
    EXPECT_LT((damped_pseudoinverse(t, 0.2) - ref_t).norm(), 1e-12);
  }
}

TEST(DampedPseudoinverse, SingularWithoutDamping) {
  Eigen::MatrixXd j(2, 2);
  j << 1, 0, 0, 0;
  EXPECT_THROW(damped_pseudoinverse(j, 0.0), SingularityError);
}

TEST(RobotModel, PlanarValidation) {
  RobotModel m = planar_arm({0.5, 0.5, 0.5}, 0.2);
  EXPECT_NO_THROW(m.validate(TaskSpace::kPlanar));
  m.joints[1].axis = Eigen::Vector3d::UnitX();
  EXPECT_THROW(m.validate(TaskSpace::kPlanar), ContractViolation);
  EXPECT_THROW(planar_arm({0.5}, 0.2).validate(TaskSpace::kPlanar), ContractViolation);
}

TEST(RobotModel, LimitsReportedNotEnforced) {
  RobotModel m = planar_arm({0.5, 0.5}, 0.2);
  m.joints[0].min = -1.0;
  m.joints[0].max = 1.0;
  const Eigen::Vector2d q(2.0, 0.0);
  EXPECT_NO_THROW(forward_kinematics(m, q));
  EXPECT_EQ(joints_out_of_limits(m, q), std::vector<std::size_t>{0});
}

}  // namespace
}  // namespace coopsafe
