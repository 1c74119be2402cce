#pragma once

#include <Eigen/Dense>

#include "coopsafe/safety.hpp"
#include "coopsafe/task.hpp"

namespace coopsafe {

struct ImpedanceParams {
  Eigen::MatrixXd M;  // empty means identity of the task dimension
  Eigen::MatrixXd D;  // empty means 6.5 I
  Eigen::MatrixXd K;  // empty means 10 I
  double k_r = 15.0;
  double delta_f = 15.0;
  double eps_rec_pos = 1e-3;
  double eps_rec_vel = 1e-3;

  // Fills empty matrices with the scaled identity defaults and checks that
  // M, D, K are m x m symmetric positive definite.
  void resolve(std::size_t m);
};

// True when the matrix is square, symmetric to 1e-12 and Cholesky-factorable.
bool is_spd(const Eigen::MatrixXd& a);

struct DeformationState {
  double t_s = 0.0;
  Eigen::VectorXd sigma_r_frozen;  // sigma_r(t_s^-)
  Eigen::VectorXd delta_sigma;
  Eigen::VectorXd delta_sigma_dot;
  Eigen::VectorXd delta_sigma_ddot;
  Eigen::VectorXd f_r;
};

// 1 at or below F_min, 0 at or above F_min + delta_f, smooth cubic in between.
double intensity_profile(double F, double f_min, double delta_f);

// -k_r f_r(F) grad / |grad| on the centroid's translational task entries,
// zero elsewhere, and zero altogether for a degenerate gradient.
Eigen::VectorXd repulsive_force(const TaskLayout& layout, const SafetyReport& report,
                                double f_min, const ImpedanceParams& params);

// Starts a deformation with zero displacement and the reference velocity held
// at its value just before the switch.
DeformationState begin_deformation(double t_s, const Eigen::VectorXd& sigma_r,
                                   const Eigen::VectorXd& sigma_r_dot);

// M dd + D d_dot + K d = f_r. Sets delta_sigma_ddot for the current state.
void impedance_acceleration(DeformationState& state, const Eigen::VectorXd& f_r,
                            const ImpedanceParams& params);

// Semi-implicit Euler with the acceleration already in the state.
void integrate_deformation(DeformationState& state, double dt);

// impedance_acceleration followed by integrate_deformation.
DeformationState impedance_step(DeformationState state, const Eigen::VectorXd& f_r,
                                const ImpedanceParams& params, double dt);

struct DeformedReference {
  Eigen::VectorXd sigma;
  Eigen::VectorXd sigma_dot;
  Eigen::VectorXd sigma_ddot;
};

DeformedReference deformed_reference(const DeformationState& state);

bool recovery_check(const DeformationState& state, const Eigen::VectorXd& f_r,
                    const ImpedanceParams& params);

}  // namespace coopsafe
