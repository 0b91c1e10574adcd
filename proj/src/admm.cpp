#include "gsopt/admm.hpp"

#include <cmath>
#include <stdexcept>

#include "gsopt/prox.hpp"

namespace gsopt::admm {

namespace {

// z-update: per-group prox of the weighted p-norm at x_bar + mu.
void update_z(AdmmState& state, const AdmmParams& params) {
  const Eigen::VectorXd v = state.x_bar + state.mu;
  int at = 0;
  for (int gi = 0; gi < state.num_groups(); ++gi) {
    const int sz = state.group_sizes[static_cast<size_t>(gi)];
    const double w = params.weights[static_cast<size_t>(gi)];
    if (params.p == 1.0) {
      for (int j = 0; j < sz; ++j) {
        state.z[at + j] = prox::prox_weighted_l1(v[at + j], w, state.rho2);
      }
    } else if (params.p == 2.0) {
      state.z.segment(at, sz) = prox::prox_weighted_group_l2(v.segment(at, sz), w, state.rho2);
    } else {
      state.z.segment(at, sz) =
          prox::prox_weighted_group_lp(v.segment(at, sz), w, state.rho2, params.p);
    }
    at += sz;
  }
}

// s-update: fidelity prox at A_S x_bar - y + lambda.
void update_s(AdmmState& state, const AdmmParams& params) {
  const Eigen::VectorXd v = state.Ax - state.y + state.lambda;
  if (params.r.is_inf()) {
    state.s = prox::prox_linf(v, params.alpha * state.rho1 / 2.0).s;
    return;
  }
  const double rv = params.r.value();
  if (rv == 2.0) {
    state.s = prox::prox_fidelity_r2(v, params.alpha, state.rho1);
  } else if (rv == 1.0) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      state.s[k] = prox::prox_weighted_l1(v[k], 1.0 / params.alpha, state.rho1);
    }
  } else {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      state.s[k] = prox::prox_fidelity_r_general(v[k], params.alpha, state.rho1, rv);
    }
  }
}

}  // namespace

Eigen::VectorXd AdmmState::solve_normal(const Eigen::VectorXd& b) const {
  const double c = rho2 + beta;
  if (!woodbury) return factor.solve(b);
  // (c I + rho1 A^T A)^{-1} b = (b - rho1 A^T (c I + rho1 A A^T)^{-1} A b) / c
  return (b - rho1 * (A_S.transpose() * factor.solve(A_S * b))) / c;
}

AdmmState admm_setup(const ProblemSpec& problem, const SupportSet& S,
                     const std::vector<double>& weights, double beta,
                     const GroupedVector& x_prev, double rho1, double rho2) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw std::invalid_argument("penalties must be positive");
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (weights.size() != S.indices.size()) {
    throw std::invalid_argument("weights must match the support");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("weights must be positive on the support");
  }

  AdmmState state;
  state.A_S = restrict_columns(problem.A, *problem.partition, S);
  state.group_sizes = support_group_sizes(*problem.partition, S);
  state.y = problem.y;
  state.rho1 = rho1;
  state.rho2 = rho2;
  state.beta = beta;
  state.x_prev = restrict_values(x_prev.values, *problem.partition, S);

  const Eigen::Index nS = state.A_S.cols();
  const Eigen::Index M = state.A_S.rows();
  const double c = rho2 + beta;
  state.woodbury = nS > M;
  if (state.woodbury) {
    Eigen::MatrixXd G = rho1 * (state.A_S * state.A_S.transpose());
    G.diagonal().array() += c;
    state.factor.compute(G);
  } else {
    Eigen::MatrixXd H = rho1 * (state.A_S.transpose() * state.A_S);
    H.diagonal().array() += c;
    state.factor.compute(H);
  }
  state.factorizations = 1;
  if (nS > 0 && state.factor.info() != Eigen::Success) {
    throw std::runtime_error("admm_setup: SPD factorization failed");
  }

  state.x_bar = state.x_prev;
  state.z = state.x_bar;
  state.mu = Eigen::VectorXd::Zero(nS);
  state.Ax = state.A_S * state.x_bar;
  state.s = state.Ax - state.y;
  state.lambda = Eigen::VectorXd::Zero(M);
  return state;
}

void admm_step(AdmmState& state, const AdmmParams& params) {
  if (static_cast<int>(params.weights.size()) != state.num_groups()) {
    throw std::invalid_argument("weights must match the support");
  }
  // Joint (z, s) minimization is separable in z and s.
  update_z(state, params);
  update_s(state, params);

  const Eigen::VectorXd rhs = state.rho1 * (state.A_S.transpose() *
                                            (state.y + state.s - state.lambda)) +
                              state.rho2 * (state.z - state.mu) + state.beta * state.x_prev;
  state.x_bar = state.solve_normal(rhs);
  state.Ax = state.A_S * state.x_bar;

  state.lambda += state.Ax - state.y - state.s;
  state.mu += state.x_bar - state.z;
}

AdmmSolveResult admm_solve(AdmmState& state, const AdmmParams& params,
                           const AdmmStopping& stopping) {
  AdmmSolveResult out;
  const Eigen::Index nS = state.support_dim();
  const Eigen::Index M = state.y.size();
  if (nS == 0) {
    out.x = Eigen::VectorXd();
    out.report.converged = true;
    return out;
  }

  // Stacked-system stopping: constraints [A_S; I] x - [y; 0] - [s; z] with
  // penalties (rho1, rho2) per block.
  const double sqrt_dim = std::sqrt(static_cast<double>(M + nS));
  const double y_norm = state.y.norm();

  out.x = state.z;
  out.objective = subproblem_objective(state, params, state.z);

  for (int it = 0; it < stopping.max_iter; ++it) {
    const Eigen::VectorXd Ax_old = state.Ax;
    const Eigen::VectorXd x_old = state.x_bar;
    const Eigen::VectorXd s_old = state.s;
    const Eigen::VectorXd z_old = state.z;

    admm_step(state, params);
    ++out.report.iterations;

    const double z_objective = subproblem_objective(state, params, state.z);
    if (z_objective < out.objective) {
      out.objective = z_objective;
      out.x = state.z;
    }

    const double prim_sq = (state.Ax - state.y - state.s).squaredNorm() +
                           (state.x_bar - state.z).squaredNorm();
    const double primal = std::sqrt(prim_sq);
    const double dual = std::hypot(state.rho1 * (state.Ax - Ax_old).norm(),
                                   state.rho2 * (state.x_bar - x_old).norm());
    const double dual_alt = (state.rho1 * (state.A_S.transpose() * (state.s - s_old)) +
                             state.rho2 * (state.z - z_old))
                                .norm();

    const double scale = std::max({std::hypot(state.Ax.norm(), state.x_bar.norm()), y_norm,
                                   std::hypot(state.s.norm(), state.z.norm())});
    const double prim_tol = sqrt_dim * stopping.eps_abs + stopping.eps_rel * scale;
    const double dual_tol = sqrt_dim * stopping.eps_abs +
                            stopping.eps_rel * std::hypot(state.rho1 * state.lambda.norm(),
                                                          state.rho2 * state.mu.norm());

    out.report.primal_residual = primal;
    out.report.dual_residual = dual;
    out.report.dual_residual_alt = dual_alt;
    if (primal <= prim_tol && dual <= dual_tol) {
      out.report.converged = true;
      break;
    }
  }
  return out;
}

double subproblem_objective(const AdmmState& state, const AdmmParams& params,
                            const Eigen::VectorXd& x) {
  double reg = 0.0;
  int at = 0;
  for (int gi = 0; gi < state.num_groups(); ++gi) {
    const int sz = state.group_sizes[static_cast<size_t>(gi)];
    reg += params.weights[static_cast<size_t>(gi)] *
           vector_norm_p(x.segment(at, sz), params.p);
    at += sz;
  }
  const double fid = fidelity_of_residual(state.A_S * x - state.y, params.alpha, params.r);
  return reg + fid + 0.5 * state.beta * (x - state.x_prev).squaredNorm();
}

}  // namespace gsopt::admm
