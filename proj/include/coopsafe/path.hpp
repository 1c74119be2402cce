#pragma once

#include <Eigen/Dense>

#include <vector>

namespace coopsafe {

enum class Interpolation { kLinear, kCubic };

struct PathSample {
  Eigen::VectorXd sigma;
  Eigen::VectorXd d1;  // d sigma / d s
  Eigen::VectorXd d2;  // d^2 sigma / d s^2
  bool clamped = false;
};

// Nominal task path sigma_n(s), s in [0, 1], through waypoints in task space.
// Knots sit at normalized cumulative chord length. The cubic variant is a
// natural spline per component. Queries outside [0, 1] are clamped.
class NominalPath {
 public:
  NominalPath() = default;
  NominalPath(std::vector<Eigen::VectorXd> waypoints, Interpolation kind);

  PathSample eval(double s) const;

  const std::vector<Eigen::VectorXd>& waypoints() const { return waypoints_; }
  const std::vector<double>& knots() const { return knots_; }
  Interpolation interpolation() const { return kind_; }
  Eigen::Index dimension() const { return waypoints_.empty() ? 0 : waypoints_.front().size(); }

  // |sigma - sigma_n(s)|
  double membership_error(const Eigen::VectorXd& sigma, double s) const;

 private:
  std::vector<Eigen::VectorXd> waypoints_;
  std::vector<double> knots_;
  std::vector<Eigen::VectorXd> second_;  // spline second derivatives at knots
  Interpolation kind_ = Interpolation::kLinear;
};

}  // namespace coopsafe
