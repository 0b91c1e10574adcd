#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gsopt/model.hpp"

namespace gsopt::admm {

// Everything the per-iteration updates need besides the evolving state.
struct AdmmParams {
  double alpha = 1.0;
  double p = 2.0;
  RParam r;
  std::vector<double> weights;  // per group in S order, positive
};

// Inner-solver state for the weighted convex subproblem restricted to the
// active support. Single-owner; mutated sequentially by admm_step.
struct AdmmState {
  Eigen::MatrixXd A_S;             // M x nS column sub-matrix
  std::vector<int> group_sizes;    // per group in S order
  Eigen::VectorXd y;
  Eigen::VectorXd x_prev;          // proximal center, nS

  Eigen::VectorXd x_bar;           // nS
  Eigen::VectorXd z;               // nS, carries the exact zeros
  Eigen::VectorXd mu;              // nS, scaled multiplier for x - z
  Eigen::VectorXd s;               // M
  Eigen::VectorXd lambda;          // M, scaled multiplier for A_S x - y - s

  double rho1 = 1.0;
  double rho2 = 1.0;
  double beta = 0.0;

  // Cached SPD factorization of rho1 A_S^T A_S + (rho2 + beta) I. When the
  // support is wider than M the M-sized system rho1 A_S A_S^T + (rho2+beta) I
  // is factored instead and applied through the matrix-inversion identity.
  Eigen::LLT<Eigen::MatrixXd> factor;
  bool woodbury = false;
  int factorizations = 0;  // performance invariant: 1 per outer step

  Eigen::VectorXd Ax;  // cached A_S * x_bar

  int num_groups() const { return static_cast<int>(group_sizes.size()); }
  int support_dim() const { return static_cast<int>(x_bar.size()); }

  // Solves (rho1 A_S^T A_S + (rho2+beta) I) x = b via the cached factor.
  Eigen::VectorXd solve_normal(const Eigen::VectorXd& b) const;
};

struct AdmmReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;      // || blkdiag(rho1 A_S, rho2 I) (xhat_new - xhat_old) ||
  double dual_residual_alt = 0.0;  // || rho1 A_S^T ds + rho2 dz ||, the constraint-adjoint form
  bool converged = false;
};

struct AdmmStopping {
  double eps_abs = 1e-3;
  double eps_rel = 1e-3;
  int max_iter = 1000;
};

// Builds A_S, caches the SPD factorization, and initializes
// x_bar = x_prev|S, z = x_bar, s = A_S x_bar - y, multipliers zero.
AdmmState admm_setup(const ProblemSpec& problem, const SupportSet& S,
                     const std::vector<double>& weights, double beta,
                     const GroupedVector& x_prev, double rho1, double rho2);

// One scaled-ADMM sweep: joint (z, s) minimization (two independent prox
// passes), x_bar via the cached factorization, then multiplier ascent.
void admm_step(AdmmState& state, const AdmmParams& params);

struct AdmmSolveResult {
  // The consensus iterate z with the smallest subproblem objective seen,
  // the entry point included (so the caller's warm start is never made
  // worse). Carries the exact zeros of the z prox.
  Eigen::VectorXd x;
  double objective = 0.0;  // subproblem objective of x
  AdmmReport report;
};

// Iterates admm_step until the stacked primal/dual residual tests pass or
// max_iter is hit. Resumable: call again on the same state with tighter
// tolerances to continue from where it stopped.
AdmmSolveResult admm_solve(AdmmState& state, const AdmmParams& params,
                           const AdmmStopping& stopping);

// Value of the support-restricted subproblem objective
//   sum_i w_i ||x_i||_p + fidelity(A_S x - y) + (beta/2)||x - x_prev||^2
// (linearization constants dropped). Used by monitoring and tests.
double subproblem_objective(const AdmmState& state, const AdmmParams& params,
                            const Eigen::VectorXd& x);

}  // namespace gsopt::admm
