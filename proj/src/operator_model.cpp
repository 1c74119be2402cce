#include "coopsafe/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coopsafe/errors.hpp"

namespace coopsafe {

ScriptedOperator::ScriptedOperator(std::vector<OperatorWaypoint> waypoints)
    : waypoints_(std::move(waypoints)) {
  if (waypoints_.empty()) throw ContractViolation("scripted operator needs at least one waypoint");
  for (std::size_t k = 0; k < waypoints_.size(); ++k) {
    if (!std::isfinite(waypoints_[k].t) || !waypoints_[k].p.allFinite()) {
      throw ContractViolation("operator waypoint " + std::to_string(k) + " is not finite");
    }
    if (k > 0 && !(waypoints_[k].t > waypoints_[k - 1].t)) {
      throw ContractViolation("operator waypoint times must be strictly increasing");
    }
  }
  const std::size_t n = waypoints_.size();
  slopes_.assign(n, Eigen::Vector3d::Zero());
  if (n < 2) return;

  std::vector<Eigen::Vector3d> secant(n - 1);
  std::vector<double> h(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = waypoints_[k + 1].t - waypoints_[k].t;
    secant[k] = (waypoints_[k + 1].p - waypoints_[k].p) / h[k];
  }
  slopes_.front() = secant.front();
  slopes_.back() = secant.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    for (int c = 0; c < 3; ++c) {
      const double d0 = secant[k - 1](c);
      const double d1 = secant[k](c);
      if (d0 * d1 <= 0.0) {
        slopes_[k](c) = 0.0;
        continue;
      }
      const double w0 = 2.0 * h[k] + h[k - 1];
      const double w1 = h[k] + 2.0 * h[k - 1];
      slopes_[k](c) = (w0 + w1) / (w0 / d0 + w1 / d1);
    }
  }
}

OperatorState ScriptedOperator::eval(double t) const {
  OperatorState out;
  out.source = OperatorSource::kScripted;
  if (waypoints_.empty()) return out;
  if (t <= waypoints_.front().t) {
    out.p = waypoints_.front().p;
    return out;
  }
  if (t >= waypoints_.back().t) {
    out.p = waypoints_.back().p;
    return out;
  }
  const auto it = std::upper_bound(waypoints_.begin(), waypoints_.end(), t,
                                   [](double v, const OperatorWaypoint& w) { return v < w.t; });
  const auto k = static_cast<std::size_t>(std::distance(waypoints_.begin(), it)) - 1;
  const double h = waypoints_[k + 1].t - waypoints_[k].t;
  const double u = (t - waypoints_[k].t) / h;
  const Eigen::Vector3d& y0 = waypoints_[k].p;
  const Eigen::Vector3d& y1 = waypoints_[k + 1].p;
  const Eigen::Vector3d m0 = slopes_[k] * h;
  const Eigen::Vector3d m1 = slopes_[k + 1] * h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  out.p = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * y1 +
          (u3 - u2) * m1;
  out.p_dot = ((6 * u2 - 6 * u) * y0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * y1 +
               (3 * u2 - 2 * u) * m1) /
              h;
  out.p_ddot =
      ((12 * u - 6) * y0 + (6 * u - 4) * m0 + (-12 * u + 6) * y1 + (6 * u - 2) * m1) / (h * h);
  return out;
}

ExternalOperatorEstimator::ExternalOperatorEstimator(const Eigen::Vector3d& spawn, double tau)
    : tau_(tau), p_(spawn) {
  if (!(tau > 0.0)) throw ContractViolation("estimator time constant must be positive");
}

OperatorState ExternalOperatorEstimator::update(const std::optional<Eigen::Vector3d>& sample,
                                                double dt) {
  if (!(dt > 0.0)) throw ContractViolation("estimator step needs dt > 0");
  if (sample && !sample->allFinite()) throw ContractViolation("injected operator position is not finite");
  if (!has_samples_ && !sample) return state();
  const Eigen::Vector3d next = sample ? *sample : p_;
  if (!has_samples_) {
    // The first sample teleports the operator; no velocity is inferred.
    p_ = next;
    has_samples_ = true;
    return state();
  }
  const double alpha = dt / (tau_ + dt);
  const Eigen::Vector3d v_prev = v_;
  v_ += alpha * ((next - p_) / dt - v_);
  a_ += alpha * ((v_ - v_prev) / dt - a_);
  p_ = next;
  return state();
}

OperatorState ExternalOperatorEstimator::state() const {
  OperatorState s;
  s.p = p_;
  s.p_dot = v_;
  s.p_ddot = a_;
  s.source = OperatorSource::kExternal;
  return s;
}

void OperatorMailbox::push(const Eigen::Vector3d& p) {
  std::lock_guard lock(mutex_);
  queue_.push_back(p);
}

std::vector<Eigen::Vector3d> OperatorMailbox::drain() {
  std::lock_guard lock(mutex_);
  std::vector<Eigen::Vector3d> out(queue_.begin(), queue_.end());
  queue_.clear();
  return out;
}

}  // namespace coopsafe
