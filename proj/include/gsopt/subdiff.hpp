#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gsopt/model.hpp"

namespace gsopt::subdiff {

// Relative tolerance for treating residual entries as tied with the maximum
// when selecting elements of the ell-infinity fidelity subdifferential.
inline constexpr double kInfTieRelTol = 1e-9;

// d/dt t^q = q t^(q-1) for t > 0. Throws std::domain_error at t <= 0 (the
// non-Lipschitz singularity; callers must guard).
double phi_prime(double t, double q);

// w_i = phi_prime(||x_i||_p, q) for each i in S, in S order. Throws when a
// group in S has zero p-norm.
std::vector<double> linearization_weights(const GroupedVector& x, const SupportSet& S, double p,
                                          double q);

// The three additive parts of a subgradient of the linearized energy,
// u = zeta + eta + beta_term, all shaped like the ambient x.
struct SubgradComponents {
  Eigen::VectorXd zeta;
  Eigen::VectorXd eta;
  Eigen::VectorXd beta_term;
  PartitionPtr partition;
};

// Selected element of the fidelity subdifferential, restricted to S.
struct FidelitySubgrad {
  Eigen::VectorXd eta_S;     // (1/alpha) A_S^T dual, stacked on S coordinates
  Eigen::VectorXd residual;  // A x - y (x taken on its full support)
  Eigen::VectorXd dual;      // selected dual vector, length M
  std::vector<int> tie_set;  // r=inf: maximal-|residual| indices; r=1: zero-residual indices
};

// For finite r > 1 this is the gradient. For r = 1 the selection uses
// sgn with sgn(0) = 0. For r = inf the dual puts equal mass (with matching
// signs) on every residual entry tied with the maximum.
FidelitySubgrad fidelity_subgradient(const ProblemSpec& problem, const GroupedVector& x,
                                     const SupportSet& S);

// Builds the additive decomposition of the minimum-norm subgradient of the
// linearized energy at `candidate` over S: zeta uses the weights frozen at
// x_prev (with the minimizing selection at nonsmooth points), eta the
// fidelity selection, beta_term the proximal part. Entries off S are zero.
SubgradComponents subgradient_components(const ProblemSpec& problem,
                                         const GroupedVector& x_prev, const SupportSet& S,
                                         const std::vector<double>& weights,
                                         const GroupedVector& candidate, double beta);

struct Certificate {
  double u_norm = 0.0;
  double bound = 0.0;
  bool satisfied = false;
};

// Minimum-norm subgradient test for an approximate subproblem solution:
// builds the smallest constructible element of the linearized energy's
// subdifferential at `candidate` over S and compares its 2-norm against
// (beta/2) * epsilon * ||candidate - x_prev||_2.
Certificate inexactness_certificate(const ProblemSpec& problem, const GroupedVector& x_prev,
                                    const SupportSet& S, const std::vector<double>& weights,
                                    const GroupedVector& candidate, double beta, double epsilon);

// 2-norm of the minimum-norm constructible element of the objective's
// subdifferential at x. Groups with ell-infinity norm <= zero_tol contribute
// zero (their subdifferential is the whole space). For r = inf the dual mass
// split over tied residual indices is chosen by a least-norm solve on the
// simplex.
double stationarity_residual(const ProblemSpec& problem, const GroupedVector& x,
                             double zero_tol = kDefaultZeroTol);

// Least-norm mass split: minimizes ||base + C theta||_2^2 over the simplex
// {theta >= 0, sum theta = 1}. Exposed for tests.
Eigen::VectorXd least_norm_simplex(const Eigen::MatrixXd& C, const Eigen::VectorXd& base);

// Gradient of the objective restricted to the coordinates of the groups in S,
// valid where the objective is smooth there (p > 1, finite r > 1, no zero
// group in S). Stacked in S order.
Eigen::VectorXd restricted_gradient(const ProblemSpec& problem, const GroupedVector& x,
                                    const SupportSet& S);

}  // namespace gsopt::subdiff
