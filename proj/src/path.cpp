#include "coopsafe/path.hpp"

#include <algorithm>
#include <string>

#include "coopsafe/errors.hpp"

namespace coopsafe {

NominalPath::NominalPath(std::vector<Eigen::VectorXd> waypoints, Interpolation kind)
    : waypoints_(std::move(waypoints)), kind_(kind) {
  if (waypoints_.size() < 2) throw ContractViolation("nominal path needs at least two waypoints");
  const Eigen::Index m = waypoints_.front().size();
  for (std::size_t k = 0; k < waypoints_.size(); ++k) {
    if (waypoints_[k].size() != m || !waypoints_[k].allFinite()) {
      throw ContractViolation("nominal path waypoint " + std::to_string(k) +
                              " has the wrong size or non-finite entries");
    }
  }
  const std::size_t n = waypoints_.size();
  knots_.assign(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double chord = (waypoints_[k] - waypoints_[k - 1]).norm();
    if (!(chord > 0.0)) {
      throw ContractViolation("nominal path waypoints " + std::to_string(k - 1) + " and " +
                              std::to_string(k) + " coincide");
    }
    knots_[k] = knots_[k - 1] + chord;
  }
  const double total = knots_.back();
  for (double& k : knots_) k /= total;
  knots_.back() = 1.0;

  second_.assign(n, Eigen::VectorXd::Zero(m));
  if (kind_ == Interpolation::kCubic && n > 2) {
    // Natural spline: tridiagonal system for interior second derivatives.
    const std::size_t inner = n - 2;
    std::vector<double> diag(inner), upper(inner), lower(inner);
    std::vector<Eigen::VectorXd> rhs(inner);
    for (std::size_t j = 0; j < inner; ++j) {
      const std::size_t k = j + 1;
      const double h0 = knots_[k] - knots_[k - 1];
      const double h1 = knots_[k + 1] - knots_[k];
      lower[j] = h0 / 6.0;
      diag[j] = (h0 + h1) / 3.0;
      upper[j] = h1 / 6.0;
      rhs[j] = (waypoints_[k + 1] - waypoints_[k]) / h1 - (waypoints_[k] - waypoints_[k - 1]) / h0;
    }
    for (std::size_t j = 1; j < inner; ++j) {
      const double w = lower[j] / diag[j - 1];
      diag[j] -= w * upper[j - 1];
      rhs[j] -= w * rhs[j - 1];
    }
    second_[inner] = rhs[inner - 1] / diag[inner - 1];
    for (std::size_t j = inner - 1; j-- > 0;) {
      second_[j + 1] = (rhs[j] - upper[j] * second_[j + 2]) / diag[j];
    }
  }
}

PathSample NominalPath::eval(double s) const {
  if (waypoints_.empty()) throw ContractViolation("nominal path is empty");
  PathSample out;
  if (s < 0.0 || s > 1.0) {
    out.clamped = true;
    s = std::clamp(s, 0.0, 1.0);
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t k = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  k = std::clamp<std::size_t>(k, 1, knots_.size() - 1) - 1;
  const double h = knots_[k + 1] - knots_[k];
  const Eigen::VectorXd& y0 = waypoints_[k];
  const Eigen::VectorXd& y1 = waypoints_[k + 1];
  if (kind_ == Interpolation::kLinear) {
    const double r = (s - knots_[k]) / h;
    out.sigma = y0 + r * (y1 - y0);
    out.d1 = (y1 - y0) / h;
    out.d2 = Eigen::VectorXd::Zero(y0.size());
    return out;
  }
  const Eigen::VectorXd& m0 = second_[k];
  const Eigen::VectorXd& m1 = second_[k + 1];
  const double a = (knots_[k + 1] - s) / h;
  const double b = (s - knots_[k]) / h;
  out.sigma = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * (h * h / 6.0);
  out.d1 = (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * (h / 6.0);
  out.d2 = a * m0 + b * m1;
  return out;
}

double NominalPath::membership_error(const Eigen::VectorXd& sigma, double s) const {
  return (sigma - eval(s).sigma).norm();
}

}  // namespace coopsafe
