#pragma once

#include <cstdint>
#include <vector>

#include "gsopt/model.hpp"
#include "gsopt/subdiff.hpp"

namespace gsopt::issapl {

struct InitSpec {
  enum class Kind { kOnes, kGaussian };
  Kind kind = Kind::kOnes;
  double c = 1.0;          // ones mode: x^0 = c * 1, c != 0
  std::uint64_t seed = 0;  // gaussian mode
};

struct SolverConfig {
  double p = 2.0;
  double q = 0.5;
  RParam r;

  double beta = 1e-4;    // proximal weight, applied from the second outer step on
  double epsilon = 0.9;  // inexactness tolerance, in [0, 1)
  double rho1 = 1.0;
  double rho2 = 1.0;

  double outer_tol = 1e-3;  // relative step stopping
  int max_outer = 100;

  double eps_abs = 1e-3;  // inner (ADMM) stopping
  double eps_rel = 1e-3;
  int max_inner = 1000;  // total inner-iteration budget per outer step

  double zero_tol = kDefaultZeroTol;
  InitSpec init;

  int tighten_rounds = 3;  // certificate-failure retries (halved tolerances)

  void validate() const;
};

// Outer-loop state. supp_G(x) == support; weights live exactly on support.
struct IterateState {
  GroupedVector x;
  SupportSet support;
  std::vector<double> weights;  // per group in support order
  int outer_iter = 0;
  double beta = 0.0;  // 0 for the first step, config.beta afterwards
};

struct OuterIterRecord {
  int iter = 0;
  double objective = 0.0;
  int support_size = 0;
  double step_norm = 0.0;
  double u_norm = 0.0;  // inexactness certificate
  double u_bound = 0.0;
  bool cert_satisfied = false;
  double min_group_norm = 0.0;  // min p-norm among surviving groups
  int inner_iterations = 0;
  int tighten_rounds = 0;
  int factorizations = 0;
  bool inner_converged = false;
  double wall_seconds = 0.0;
};

struct RunRecord {
  std::vector<OuterIterRecord> iters;
  double initial_objective = 0.0;  // objective at x^0
  bool converged = false;          // stopped by the relative step criterion
  double total_seconds = 0.0;
};

// x^0 = c * ones or i.i.d. standard Gaussian (seeded); support = all groups.
IterateState initialize(const SolverConfig& config, PartitionPtr partition);

// One outer step: weights on S, inner ADMM solve, inexactness certificate with
// tighten-and-resume, embed with zeros off S, recompute support and weights.
IterateState outer_step(const IterateState& state, const ProblemSpec& problem,
                        const SolverConfig& config, OuterIterRecord* record);

struct SolveResult {
  GroupedVector x;
  RunRecord record;
};

SolveResult solve(const ProblemSpec& problem, const SolverConfig& config);

// Spec-shaped wrapper over subdiff::inexactness_certificate.
inline subdiff::Certificate inexactness_certificate(const ProblemSpec& problem,
                                                    const IterateState& prev,
                                                    const GroupedVector& candidate, double beta,
                                                    double epsilon) {
  return subdiff::inexactness_certificate(problem, prev.x, prev.support, prev.weights, candidate,
                                          beta, epsilon);
}

}  // namespace gsopt::issapl
