#include "coopsafe/deformation.hpp"

#include <string>

#include "coopsafe/errors.hpp"

namespace coopsafe {
namespace {

constexpr double kDegenerateGradient = 1e-12;

void resolve_matrix(Eigen::MatrixXd& a, std::size_t m, double diag, const char* name) {
  const auto n = static_cast<Eigen::Index>(m);
  if (a.size() == 0) {
    a = diag * Eigen::MatrixXd::Identity(n, n);
    return;
  }
  if (a.rows() != n || a.cols() != n) {
    throw ContractViolation(std::string("impedance matrix ") + name + " must be " +
                            std::to_string(m) + "x" + std::to_string(m));
  }
  if (!is_spd(a)) {
    throw ContractViolation(std::string("impedance matrix ") + name +
                            " is not symmetric positive definite");
  }
}

}  // namespace

bool is_spd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.size() == 0 || !a.allFinite()) return false;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  return llt.info() == Eigen::Success;
}

void ImpedanceParams::resolve(std::size_t m) {
  resolve_matrix(M, m, 1.0, "M");
  resolve_matrix(D, m, 6.5, "D");
  resolve_matrix(K, m, 10.0, "K");
  if (!(k_r >= 0.0)) throw ContractViolation("kR must be non-negative");
  if (!(delta_f > 0.0)) throw ContractViolation("deltaF must be positive");
  if (!(eps_rec_pos > 0.0) || !(eps_rec_vel > 0.0)) {
    throw ContractViolation("recovery thresholds must be positive");
  }
}

double intensity_profile(double F, double f_min, double delta_f) {
  if (!(delta_f > 0.0)) throw ContractViolation("deltaF must be positive");
  if (F <= f_min) return 1.0;
  if (F >= f_min + delta_f) return 0.0;
  const double u = (F - f_min) / delta_f;
  return 1.0 - 3.0 * u * u + 2.0 * u * u * u;
}

Eigen::VectorXd repulsive_force(const TaskLayout& layout, const SafetyReport& report,
                                double f_min, const ImpedanceParams& params) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.m()));
  const double intensity = intensity_profile(report.F, f_min, params.delta_f);
  const double norm = report.grad_F_po.norm();
  if (intensity == 0.0 || report.grad_degenerate || norm < kDegenerateGradient) return f;
  const Eigen::Vector3d dir = report.grad_F_po / norm;
  for (const auto& [index, axis] : layout.centroid_translation()) {
    f(static_cast<Eigen::Index>(index)) = -params.k_r * intensity * dir(axis);
  }
  return f;
}

DeformationState begin_deformation(double t_s, const Eigen::VectorXd& sigma_r,
                                   const Eigen::VectorXd& sigma_r_dot) {
  if (sigma_r.size() != sigma_r_dot.size()) {
    throw ContractViolation("frozen reference and velocity differ in size");
  }
  DeformationState s;
  s.t_s = t_s;
  s.sigma_r_frozen = sigma_r;
  s.delta_sigma = Eigen::VectorXd::Zero(sigma_r.size());
  s.delta_sigma_dot = sigma_r_dot;
  s.delta_sigma_ddot = Eigen::VectorXd::Zero(sigma_r.size());
  s.f_r = Eigen::VectorXd::Zero(sigma_r.size());
  return s;
}

void impedance_acceleration(DeformationState& state, const Eigen::VectorXd& f_r,
                            const ImpedanceParams& params) {
  if (f_r.size() != state.delta_sigma.size() || params.M.rows() != f_r.size()) {
    throw ContractViolation("impedance dimensions do not match the task dimension");
  }
  state.f_r = f_r;
  const Eigen::VectorXd rhs = f_r - params.D * state.delta_sigma_dot - params.K * state.delta_sigma;
  if (params.M.isDiagonal(0.0)) {
    state.delta_sigma_ddot = rhs.cwiseQuotient(params.M.diagonal());
  } else {
    state.delta_sigma_ddot = params.M.llt().solve(rhs);
  }
}

void integrate_deformation(DeformationState& state, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("impedance step needs dt > 0");
  state.delta_sigma_dot += state.delta_sigma_ddot * dt;
  state.delta_sigma += state.delta_sigma_dot * dt;
}

DeformationState impedance_step(DeformationState state, const Eigen::VectorXd& f_r,
                                const ImpedanceParams& params, double dt) {
  impedance_acceleration(state, f_r, params);
  integrate_deformation(state, dt);
  return state;
}

DeformedReference deformed_reference(const DeformationState& state) {
  DeformedReference r;
  r.sigma = state.sigma_r_frozen + state.delta_sigma;
  r.sigma_dot = state.delta_sigma_dot;
  r.sigma_ddot = state.delta_sigma_ddot;
  return r;
}

bool recovery_check(const DeformationState& state, const Eigen::VectorXd& f_r,
                    const ImpedanceParams& params) {
  return f_r.norm() == 0.0 && state.delta_sigma.norm() <= params.eps_rec_pos &&
         state.delta_sigma_dot.norm() <= params.eps_rec_vel;
}

}  // namespace coopsafe
