#include "gsopt/issapl.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsopt/admm.hpp"
#include "gsopt/rng.hpp"

namespace gsopt::issapl {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void SolverConfig::validate() const {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in [0, 1)");
  if (!(rho1 > 0.0 && rho2 > 0.0)) throw std::invalid_argument("penalties must be positive");
  if (!(outer_tol > 0.0)) throw std::invalid_argument("outer_tol must be positive");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("iteration caps must be >= 1");
  if (!(eps_abs > 0.0 && eps_rel >= 0.0)) throw std::invalid_argument("bad inner tolerances");
  if (zero_tol < 0.0) throw std::invalid_argument("zero_tol must be >= 0");
  if (tighten_rounds < 0) throw std::invalid_argument("tighten_rounds must be >= 0");
  if (init.kind == InitSpec::Kind::kOnes && init.c == 0.0) {
    throw std::invalid_argument("ones initialization requires c != 0");
  }
}

IterateState initialize(const SolverConfig& config, PartitionPtr partition) {
  config.validate();
  const int n = partition->total_size();
  Eigen::VectorXd x0(n);
  if (config.init.kind == InitSpec::Kind::kOnes) {
    x0.setConstant(config.init.c);
  } else {
    rng::Rng gen(rng::mix(config.init.seed, 0x1717));
    for (int j = 0; j < n; ++j) x0[j] = gen.gaussian();
  }
  IterateState state{GroupedVector(std::move(x0), partition),
                     SupportSet::all(partition->num_groups()),
                     {},
                     0,
                     0.0};  // no proximal term on the very first step
  state.weights = subdiff::linearization_weights(state.x, state.support, config.p, config.q);
  return state;
}

IterateState outer_step(const IterateState& state, const ProblemSpec& problem,
                        const SolverConfig& config, OuterIterRecord* record) {
  const auto t0 = std::chrono::steady_clock::now();
  const SupportSet& S = state.support;

  OuterIterRecord rec;
  rec.iter = state.outer_iter;

  if (S.empty()) {
    // Nothing left to optimize; the zero vector is already stationary.
    IterateState next{GroupedVector::zeros(state.x.partition), S, {}, state.outer_iter + 1,
                      config.beta};
    rec.objective = objective(problem, next.x);
    rec.wall_seconds = seconds_since(t0);
    if (record) *record = rec;
    return next;
  }

  const double beta_eff = state.beta;
  admm::AdmmState inner =
      admm::admm_setup(problem, S, state.weights, beta_eff, state.x, config.rho1, config.rho2);
  admm::AdmmParams params{problem.alpha, problem.p, problem.r, state.weights};

  const double obj_prev = objective(problem, state.x);
  double eps_abs = config.eps_abs;
  double eps_rel = config.eps_rel;

  GroupedVector candidate = GroupedVector::zeros(state.x.partition);
  subdiff::Certificate cert;
  int total_inner = 0;
  int rounds = 0;
  bool inner_converged = false;
  double obj_new = obj_prev;
  double step_sq = 0.0;
  Eigen::VectorXd best_x;
  double best_sub = std::numeric_limits<double>::infinity();

  // Solve, certify, and tighten-and-resume while either the inexactness
  // certificate or the sufficient-decrease guard fails. Each round returns
  // the best subproblem iterate it saw (the warm start included), and the
  // best across rounds becomes the step; since the round-0 warm start is
  // x^(l) itself, the linearized majorant never increases and descent of the
  // objective follows at any inner accuracy.
  while (true) {
    const admm::AdmmStopping stopping{eps_abs, eps_rel, config.max_inner - total_inner};
    const admm::AdmmSolveResult res = admm::admm_solve(inner, params, stopping);
    total_inner += res.report.iterations;
    inner_converged = res.report.converged;
    if (res.objective < best_sub) {
      best_sub = res.objective;
      best_x = res.x;
    }

    candidate = embed_on_support(best_x, state.x.partition, S);
    cert = subdiff::inexactness_certificate(problem, state.x, S, state.weights, candidate,
                                            beta_eff, config.epsilon);
    obj_new = objective(problem, candidate);
    step_sq = (candidate.values - state.x.values).squaredNorm();

    const bool cert_ok = cert.satisfied || beta_eff == 0.0;
    const bool decrease_ok =
        obj_new + 0.5 * beta_eff * (1.0 - config.epsilon) * step_sq <=
        obj_prev + 1e-12 * (1.0 + std::abs(obj_prev));
    if ((cert_ok && decrease_ok) || rounds >= config.tighten_rounds ||
        total_inner >= config.max_inner) {
      break;
    }
    ++rounds;
    eps_abs *= 0.5;
    eps_rel *= 0.5;
  }

  SupportSet next_support = group_support(candidate, config.zero_tol);
  std::vector<double> next_weights =
      subdiff::linearization_weights(candidate, next_support, config.p, config.q);

  rec.objective = obj_new;
  rec.support_size = next_support.size();
  rec.step_norm = std::sqrt(step_sq);
  rec.u_norm = cert.u_norm;
  rec.u_bound = cert.bound;
  rec.cert_satisfied = cert.satisfied;
  rec.inner_iterations = total_inner;
  rec.tighten_rounds = rounds;
  rec.factorizations = inner.factorizations;
  rec.inner_converged = inner_converged;
  double min_norm = 0.0;
  for (size_t si = 0; si < next_support.indices.size(); ++si) {
    const double nrm = group_norm(candidate, next_support.indices[si], problem.p);
    min_norm = si == 0 ? nrm : std::min(min_norm, nrm);
  }
  rec.min_group_norm = min_norm;
  rec.wall_seconds = seconds_since(t0);
  if (record) *record = rec;

  return IterateState{std::move(candidate), std::move(next_support), std::move(next_weights),
                      state.outer_iter + 1, config.beta};
}

SolveResult solve(const ProblemSpec& problem, const SolverConfig& config) {
  problem.validate();
  config.validate();
  if (config.p != problem.p || config.q != problem.q || !(config.r == problem.r)) {
    throw std::invalid_argument("solver config (p, q, r) disagrees with the problem instance");
  }

  const auto t0 = std::chrono::steady_clock::now();
  IterateState state = initialize(config, problem.partition);

  RunRecord run;
  run.initial_objective = objective(problem, state.x);
  run.iters.reserve(static_cast<size_t>(config.max_outer));

  for (int l = 0; l < config.max_outer; ++l) {
    const Eigen::VectorXd x_prev = state.x.values;
    const double prev_norm = x_prev.norm();

    OuterIterRecord rec;
    state = outer_step(state, problem, config, &rec);
    run.iters.push_back(rec);

    const double step = (state.x.values - x_prev).norm();
    if (prev_norm == 0.0) {
      run.converged = step == 0.0;
      break;
    }
    if (step <= config.outer_tol * prev_norm) {
      run.converged = true;
      break;
    }
  }

  run.total_seconds = seconds_since(t0);
  return SolveResult{std::move(state.x), std::move(run)};
}

}  // namespace gsopt::issapl
