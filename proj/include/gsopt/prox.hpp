#pragma once

#include <Eigen/Dense>

namespace gsopt::prox {

// argmin_z  weight*|z| + (rho/2)(z - v)^2  — soft threshold at weight/rho.
double prox_weighted_l1(double v, double weight, double rho);

// argmin_z  weight*||z||_2 + (rho/2)||z - v||_2^2  — group shrinkage.
Eigen::VectorXd prox_weighted_group_l2(const Eigen::VectorXd& v, double weight, double rho);

// argmin_z  weight*||z||_p + (rho/2)||z - v||_2^2 for p > 1, solved to
// gradient norm <= 1e-10. Throws std::runtime_error when the inner iteration
// cap is exceeded.
Eigen::VectorXd prox_weighted_group_lp(const Eigen::VectorXd& v, double weight, double rho,
                                       double p);

// argmin_s  (1/(2 alpha)) s^2 + (rho1/2)(s - v)^2, componentwise closed form.
Eigen::VectorXd prox_fidelity_r2(const Eigen::VectorXd& v, double alpha, double rho1);
double prox_fidelity_r2_scalar(double v, double alpha, double rho1);

// argmin_s  (1/(r alpha)) |s|^r + (rho1/2)(s - v)^2 for r > 1, safeguarded
// 1-D Newton to |derivative| <= 1e-12 scale. Preserves sgn(v), |s| <= |v|.
double prox_fidelity_r_general(double v, double alpha, double rho1, double r);

struct LinfProxResult {
  double t_star = 0.0;  // optimal infinity-norm level
  int i_star = -1;      // index into the ascending-sorted magnitudes; -1 when t_star forced to 0
  Eigen::VectorXd s;    // clamped output
};

// argmin_s  ||s||_inf + quad_weight * ||s - v||_2^2 with quad_weight > 0.
// Sorts |v| ascending, locates the interval containing the stationary level
// t_star, clamps: s_j = v_j when |v_j| <= t_star, else sgn(v_j) * t_star.
LinfProxResult prox_linf(const Eigen::VectorXd& v, double quad_weight);

// The piecewise-quadratic level objective behind prox_linf:
//   f(t) = t + quad_weight * sum_{|v_j| > t} (|v_j| - t)^2.
// Exposed for property tests.
double linf_level_objective(const Eigen::VectorXd& v, double quad_weight, double t);

}  // namespace gsopt::prox
