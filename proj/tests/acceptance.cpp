// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria. Run with no arguments for all criteria, or a
// list of criterion numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "gsopt/bench.hpp"
#include "gsopt/datagen.hpp"
#include "gsopt/issapl.hpp"
#include "gsopt/model.hpp"
#include "gsopt/oracle.hpp"
#include "gsopt/prox.hpp"
#include "gsopt/rng.hpp"
#include "gsopt/subdiff.hpp"
#include "gsopt/verify.hpp"

using namespace gsopt;
using Clock = std::chrono::steady_clock;

namespace {

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_threads = 2;

// ---------------------------------------------------------------------------
// 1. Prox oracle equivalence: 1000 instances per operator within 1e-6,
//    under one minute.
Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto suites = verify::run_prox_suites(2024, 1000);
  const double secs = elapsed_s(t0);
  double worst = 0.0;
  bool pass = true;
  for (const auto& s : suites) {
    worst = std::max(worst, s.max_abs_dev);
    pass = pass && s.pass;
  }
  pass = pass && secs < 60.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu suites, worst deviation %.2e (tol 1e-6), %.1f s (< 60 s)",
                suites.size(), worst, secs);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 2. Infinity-norm prox worked case and boundary case.
Outcome criterion2() {
  Eigen::VectorXd v(3);
  v << 1, 2, 3;
  const auto res = prox::prox_linf(v, 1.0);
  auto f = [&](double t) { return prox::linf_level_objective(v, 1.0, t); };
  const double t_grid = oracle::grid_prox_1d(f, 0.0, 3.0, 3.0 / 3000.0);

  bool pass = std::abs(res.t_star - 2.5) <= 1e-9;
  pass = pass && std::abs(t_grid - 2.5) <= 1e-6;
  pass = pass && std::abs(res.s[0] - 1.0) <= 1e-12 && std::abs(res.s[1] - 2.0) <= 1e-12 &&
         std::abs(res.s[2] - 2.5) <= 1e-9;

  Eigen::VectorXd v2(2);
  v2 << 1, 1;
  const auto res2 = prox::prox_linf(v2, 0.2);
  pass = pass && res2.t_star == 0.0 && res2.s.norm() == 0.0;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "t*=%.6f (want 2.5, grid %.6f), s=(%.3f, %.3f, %.3f); boundary case s=0: %s",
                res.t_star, t_grid, res.s[0], res.s[1], res.s[2],
                res2.s.norm() == 0.0 ? "yes" : "no");
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Shared driver for criteria 3 and 4: twenty instances spanning
// (p, q, r) in {1,2} x {0.3,0.5,0.7} x {1,2,inf}.
struct TrackedRun {
  std::vector<double> objectives;  // E(x^0), E(x^1), ...
  std::vector<double> step_norms;
  std::vector<SupportSet> supports;
  double beta = 0.0;
  double epsilon = 0.0;
};

std::vector<TrackedRun> tracked_runs() {
  static std::vector<TrackedRun> cache;
  if (!cache.empty()) return cache;

  std::vector<std::tuple<double, double, RParam>> combos;
  for (double p : {1.0, 2.0}) {
    for (double q : {0.3, 0.5, 0.7}) {
      for (const auto& r : {RParam::finite(1.0), RParam::finite(2.0), RParam::inf()}) {
        combos.emplace_back(p, q, r);
      }
    }
  }
  combos.emplace_back(2.0, 0.5, RParam::finite(2.0));  // two repeats, fresh seeds
  combos.emplace_back(1.0, 0.5, RParam::finite(1.0));

  std::map<std::string, double> alpha_by_r{{"1", 0.5}, {"2", 0.01}, {"inf", 0.005}};
  int seed = 900;
  for (const auto& [p, q, r] : combos) {
    datagen::GenSpec spec{32, 64, 4, 3, 0.01, datagen::NoiseKind::kGaussian,
                          static_cast<std::uint64_t>(seed++)};
    auto inst = datagen::gen_problem(spec, alpha_by_r.at(r.str()), p, q, r);
    issapl::SolverConfig cfg;
    cfg.p = p;
    cfg.q = q;
    cfg.r = r;

    TrackedRun run;
    run.beta = cfg.beta;
    run.epsilon = cfg.epsilon;
    issapl::IterateState state = issapl::initialize(cfg, inst.problem.partition);
    run.objectives.push_back(objective(inst.problem, state.x));
    run.supports.push_back(state.support);
    for (int l = 0; l < cfg.max_outer; ++l) {
      const Eigen::VectorXd before = state.x.values;
      const double before_norm = before.norm();
      issapl::OuterIterRecord rec;
      state = issapl::outer_step(state, inst.problem, cfg, &rec);
      run.objectives.push_back(rec.objective);
      run.step_norms.push_back(rec.step_norm);
      run.supports.push_back(state.support);
      if (before_norm == 0.0 || rec.step_norm <= cfg.outer_tol * before_norm) break;
    }
    cache.push_back(std::move(run));
  }
  return cache;
}

// 3. Sufficient decrease at every outer iteration, slack 1e-8 (1 + E).
Outcome criterion3() {
  const auto t0 = Clock::now();
  const auto runs = tracked_runs();
  int violations = 0;
  int steps = 0;
  double worst_gap = 0.0;
  for (const auto& run : runs) {
    for (size_t l = 0; l + 1 < run.objectives.size(); ++l) {
      const double e_prev = run.objectives[l];
      const double e_next = run.objectives[l + 1];
      const double step = run.step_norms[l];
      // The proximal weight applies from the second step on.
      const double beta_eff = l == 0 ? 0.0 : run.beta;
      const double lhs = e_next + 0.5 * beta_eff * (1.0 - run.epsilon) * step * step;
      const double rhs = e_prev + 1e-8 * (1.0 + std::abs(e_prev));
      worst_gap = std::max(worst_gap, lhs - rhs);
      if (lhs > rhs) ++violations;
      ++steps;
    }
  }
  const double secs = elapsed_s(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "20 instances, %d outer steps, %d violations, worst slack gap %.2e, %.1f s "
                "(< 300 s)",
                steps, violations, worst_gap, secs);
  return {violations == 0 && secs < 300.0, buf};
}

// 4. Support nesting and finite stabilization on the same instances.
Outcome criterion4() {
  const auto runs = tracked_runs();
  int nesting_violations = 0;
  int unstabilized = 0;
  for (const auto& run : runs) {
    for (size_t l = 0; l + 1 < run.supports.size(); ++l) {
      if (!run.supports[l + 1].subset_of(run.supports[l])) ++nesting_violations;
    }
    const size_t n = run.supports.size();
    if (n >= 2 && !(run.supports[n - 1] == run.supports[n - 2])) ++unstabilized;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu runs, nesting violations %d, runs without final stabilization %d",
                runs.size(), nesting_violations, unstabilized);
  return {nesting_violations == 0 && unstabilized == 0, buf};
}

// ---------------------------------------------------------------------------
// 5. Noise-level reproduction: mean relative error bands for s = 8 and 16.
Outcome criterion5() {
  const auto t0 = Clock::now();
  bench::ExperimentPlan plan;
  plan.gen = datagen::GenSpec{256, 1024, 8, 8, 0.001, datagen::NoiseKind::kGaussian, 0};
  plan.alpha = 0.005;
  plan.solver.p = 2.0;
  plan.solver.q = 0.5;
  plan.solver.r = RParam::finite(2.0);
  plan.axis = bench::SweepAxis::kS;
  plan.values = {8.0, 16.0};
  plan.trials = 10;
  plan.seed = 1;
  const auto rows = bench::run_experiment(plan, g_threads);
  const double secs = elapsed_s(t0);

  const double e8 = rows[0].rel_err_mean;
  const double e16 = rows[1].rel_err_mean;
  const bool pass = e8 >= 0.002 && e8 <= 0.010 && e16 >= 0.003 && e16 <= 0.013 && secs < 600.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean rel err s=8: %.4f (band [0.002, 0.010]), s=16: %.4f (band [0.003, "
                "0.013]), %.1f s (< 600 s)",
                e8, e16, secs);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 6. Fidelity-vs-noise pattern: the matched r wins at least 10 of 12 cells.
Outcome criterion6() {
  const auto t0 = Clock::now();
  const std::map<std::string, double> alphas{{"1", 0.5}, {"2", 0.01}, {"inf", 0.005}};
  const std::map<datagen::NoiseKind, std::string> matched{
      {datagen::NoiseKind::kLaplace, "1"},
      {datagen::NoiseKind::kGaussian, "2"},
      {datagen::NoiseKind::kUniform, "inf"}};

  int wins = 0, cells = 0;
  for (const auto noise : {datagen::NoiseKind::kLaplace, datagen::NoiseKind::kGaussian,
                           datagen::NoiseKind::kUniform}) {
    std::map<std::string, std::vector<double>> errs;
    for (const auto& r : {RParam::finite(1.0), RParam::finite(2.0), RParam::inf()}) {
      bench::ExperimentPlan plan;
      plan.gen = datagen::GenSpec{256, 1024, 4, 4, 0.01, noise, 0};
      plan.alpha = alphas.at(r.str());
      plan.solver.p = 2.0;
      plan.solver.q = 0.5;
      plan.solver.r = r;
      plan.axis = bench::SweepAxis::kS;
      plan.values = {4.0, 8.0, 12.0, 16.0};
      plan.trials = 10;
      plan.seed = 2;
      for (const auto& row : bench::run_experiment(plan, g_threads)) {
        errs[r.str()].push_back(row.rel_err_mean);
      }
    }
    for (size_t si = 0; si < 4; ++si) {
      std::string best;
      double best_err = 0.0;
      for (const auto& [rname, vals] : errs) {
        if (best.empty() || vals[si] < best_err) {
          best = rname;
          best_err = vals[si];
        }
      }
      wins += best == matched.at(noise) ? 1 : 0;
      ++cells;
    }
  }
  const double secs = elapsed_s(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "matched r strictly best in %d of %d cells (need >= 10), %.1f s "
                                  "(< 1800 s)",
                wins, cells, secs);
  return {wins >= 10 && secs < 1800.0, buf};
}

// ---------------------------------------------------------------------------
// 7. Exact recovery: sigma = 0, s <= 4, every seed below 1e-4 relative error.
Outcome criterion7() {
  const auto t0 = Clock::now();
  bench::ExperimentPlan plan;
  plan.gen = datagen::GenSpec{64, 256, 8, 4, 0.0, datagen::NoiseKind::kGaussian, 0};
  plan.alpha = 1e-5;
  plan.solver.p = 2.0;
  plan.solver.q = 0.5;
  plan.solver.r = RParam::finite(2.0);
  plan.solver.eps_abs = plan.solver.eps_rel = 1e-6;
  plan.solver.outer_tol = 1e-6;
  plan.solver.max_inner = 4000;
  plan.axis = bench::SweepAxis::kS;
  plan.values = {1.0, 2.0, 3.0, 4.0};
  plan.trials = 20;
  plan.success_threshold = 1e-4;
  plan.seed = 31;
  const auto rows = bench::run_experiment(plan, g_threads);
  const double secs = elapsed_s(t0);

  bool pass = secs < 120.0;
  double worst_rate = 1.0;
  double worst_err = 0.0;
  for (const auto& row : rows) {
    worst_rate = std::min(worst_rate, row.success_rate);
    for (const auto& trial : row.trials) worst_err = std::max(worst_err, trial.rel_err);
    pass = pass && row.success_rate == 1.0;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "s in {1..4}, 20 seeds each: min success rate %.2f (need 1.0), worst rel err "
                "%.2e (< 1e-4), %.1f s (< 120 s)",
                worst_rate, worst_err, secs);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 8. Stationarity of smooth-case outputs plus the finite-difference gradient
//    check of the restricted objective.
Outcome criterion8() {
  double worst_resid = 0.0;
  for (int t = 0; t < 5; ++t) {
    datagen::GenSpec spec{64, 256, 8, 4, 0.001, datagen::NoiseKind::kGaussian,
                          static_cast<std::uint64_t>(500 + t)};
    auto inst = datagen::gen_problem(spec, 0.005, 2.0, 0.5, RParam::finite(2.0));
    issapl::SolverConfig cfg;
    cfg.p = 2.0;
    cfg.q = 0.5;
    cfg.r = RParam::finite(2.0);
    cfg.eps_abs = cfg.eps_rel = 1e-8;
    cfg.outer_tol = 1e-7;
    cfg.max_inner = 20000;
    const auto res = issapl::solve(inst.problem, cfg);
    worst_resid = std::max(worst_resid, subdiff::stationarity_residual(inst.problem, res.x));
  }

  // Analytic restricted gradient vs central differences at random smooth points.
  rng::Rng gen(77);
  double worst_rel = 0.0;
  for (int t = 0; t < 5; ++t) {
    datagen::GenSpec spec{16, 32, 4, 8, 0.01, datagen::NoiseKind::kGaussian,
                          static_cast<std::uint64_t>(600 + t)};
    auto inst = datagen::gen_problem(spec, 0.3, 2.0, 0.5, RParam::finite(2.0));
    Eigen::VectorXd xv(32);
    for (int j = 0; j < 32; ++j) xv[j] = 1.0 + 0.3 * gen.gaussian();
    const GroupedVector x(xv, inst.problem.partition);
    const SupportSet S = SupportSet::all(8);
    const Eigen::VectorXd grad = subdiff::restricted_gradient(inst.problem, x, S);
    Eigen::VectorXd fd(32);
    for (int j = 0; j < 32; ++j) {
      const double h = 1e-6;
      Eigen::VectorXd xp = xv, xm = xv;
      xp[j] += h;
      xm[j] -= h;
      fd[j] = (objective(inst.problem, GroupedVector(xp, inst.problem.partition)) -
               objective(inst.problem, GroupedVector(xm, inst.problem.partition))) /
              (2.0 * h);
    }
    worst_rel = std::max(worst_rel, (fd - grad).norm() / (1.0 + grad.norm()));
  }

  const bool pass = worst_resid <= 1e-2 && worst_rel <= 1e-5;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "worst stationarity residual %.2e (<= 1e-2); worst FD gradient mismatch %.2e "
                "(<= 1e-5 relative)",
                worst_resid, worst_rel);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 9. q-sweep trend at the phase-transition point.
Outcome criterion9() {
  const auto t0 = Clock::now();
  bench::ExperimentPlan plan;
  plan.gen = datagen::GenSpec{128, 512, 8, 14, 0.001, datagen::NoiseKind::kGaussian, 0};
  plan.alpha = 0.0005;
  plan.solver.p = 2.0;
  plan.solver.q = 0.5;
  plan.solver.r = RParam::finite(2.0);
  plan.axis = bench::SweepAxis::kQ;
  plan.values = {0.1, 0.3, 0.5, 0.7, 0.9};
  plan.trials = 50;
  plan.seed = 41;
  const auto rows = bench::run_experiment(plan, g_threads);
  const double secs = elapsed_s(t0);

  const double rate01 = rows[0].success_rate;
  const double rate05 = rows[2].success_rate;
  const double rate09 = rows[4].success_rate;
  const bool near_transition = rate05 >= 0.3 && rate05 <= 0.8;
  const bool pass =
      rate05 >= rate01 - 0.10 && rate05 >= rate09 - 0.10 && near_transition && secs < 900.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "success rates q=0.1: %.2f, q=0.5: %.2f (transition point), q=0.9: %.2f; "
                "need q0.5 >= others - 0.10; %.1f s",
                rate01, rate05, rate09, secs);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// 10. Timing scaling under doubling, and one factorization per outer step.
Outcome criterion10() {
  std::vector<double> times;
  bool factor_ok = true;
  for (const auto& [M, N, s] : std::vector<std::tuple<int, int, int>>{
           {64, 256, 4}, {128, 512, 8}, {256, 1024, 16}}) {
    double best = 1e100;
    for (int t = 0; t < 5; ++t) {
      datagen::GenSpec spec{M, N, 8, s, 0.001, datagen::NoiseKind::kGaussian,
                            static_cast<std::uint64_t>(700 + t)};
      auto inst = datagen::gen_problem(spec, 0.005, 2.0, 0.5, RParam::finite(2.0));
      issapl::SolverConfig cfg;
      cfg.p = 2.0;
      cfg.q = 0.5;
      cfg.r = RParam::finite(2.0);
      const auto t0 = Clock::now();
      const auto res = issapl::solve(inst.problem, cfg);
      best = std::min(best, elapsed_s(t0));
      for (const auto& it : res.record.iters) factor_ok = factor_ok && it.factorizations == 1;
    }
    times.push_back(best);
  }
  const double ratio1 = times[1] / times[0];
  const double ratio2 = times[2] / times[1];
  const bool pass = ratio1 < 8.0 && ratio2 < 8.0 && factor_ok;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "best-of-5 solve times %.3f / %.3f / %.3f s; doubling ratios %.2f, %.2f "
                "(< 8 = dense cubic); factorizations per outer step == 1: %s",
                times[0], times[1], times[2], ratio1, ratio2, factor_ok ? "yes" : "no");
  return {pass, buf};
}

const char* kDescriptions[10] = {
    "prox oracle equivalence (1000 instances per operator, 1e-6)",
    "infinity-norm prox worked case",
    "sufficient decrease at every outer iteration",
    "support nesting and stabilization",
    "noise-level error reproduction (s = 8, 16)",
    "fidelity-vs-noise matched-r pattern",
    "exact recovery regime (sigma = 0)",
    "stationarity of smooth-case output",
    "q-sweep trend at the phase transition",
    "timing scaling and factorization reuse",
};

Outcome (*kCriteria[10])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                              criterion6, criterion7, criterion8, criterion9, criterion10};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--threads") == 0 && a + 1 < argc) {
      g_threads = std::atoi(argv[++a]);
      continue;
    }
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > 10) {
      std::fprintf(stderr, "usage: acceptance [--threads T] [criterion numbers 1..10]\n");
      return 64;
    }
    which.push_back(k);
  }
  if (which.empty()) {
    for (int k = 1; k <= 10; ++k) which.push_back(k);
  }

  int failures = 0;
  for (int k : which) {
    Outcome out;
    try {
      out = kCriteria[k - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %2d: %s — %s\n", out.pass ? "PASS" : "FAIL", k,
                kDescriptions[k - 1], out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures;
}
