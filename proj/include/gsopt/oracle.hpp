#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

// Independent reference computations for tests and field verification.
// Deliberately slow and simple; never called from the solver path.
namespace gsopt::oracle {

// Exhaustive grid argmin on [lo, hi] at the given resolution, refined by
// golden-section search to an interval width of 1e-10.
double grid_prox_1d(const std::function<double(double)>& f, double lo, double hi,
                    double resolution);

// Reference minimizer of  weight*||z||_p + (rho/2)||z - v||^2  for p >= 1.
// Zero case decided by the dual-norm bound; p > 1 by monotone descent with
// backtracking; p = 1 componentwise by grid_prox_1d. Throws on
// non-convergence.
Eigen::VectorXd projected_gradient_prox(double weight, double rho, double p,
                                        const Eigen::VectorXd& v, double tol = 1e-10);

// Damped-Newton reference for the smooth inner subproblem (p = 2, r = 2,
// all groups nonzero at the solution):
//   sum_i w_i ||x_i||_2 + (1/(2 alpha))||A x - y||^2 + (beta/2)||x - x_prev||^2
// solved to gradient norm <= grad_tol. Throws if Newton stalls or a group
// collapses to zero (outside this oracle's domain).
Eigen::VectorXd dense_smooth_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                   double alpha, const std::vector<int>& group_sizes,
                                   const std::vector<double>& weights, double beta,
                                   const Eigen::VectorXd& x_prev, double grad_tol = 1e-10);

// Iteratively refined dense grid argmin over a small box in R^d. Used for
// tiny nonsmooth instances where no other independent reference exists.
Eigen::VectorXd refined_grid_argmin(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd lo, Eigen::VectorXd hi, int points_per_dim,
                                    int rounds);

}  // namespace gsopt::oracle
