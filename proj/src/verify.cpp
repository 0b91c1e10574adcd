#include "gsopt/verify.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gsopt/oracle.hpp"
#include "gsopt/prox.hpp"
#include "gsopt/rng.hpp"

namespace gsopt::verify {

namespace {

Eigen::VectorXd random_vector(rng::Rng& gen, int lo_dim, int hi_dim, double scale) {
  const int n = gen.uniform_int(lo_dim, hi_dim);
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v[j] = scale * gen.gaussian();
  return v;
}

SuiteResult suite_weighted_l1(std::uint64_t seed, int count) {
  SuiteResult res{"prox_weighted_l1", count, 0.0, 1e-6, false};
  rng::Rng gen(seed);
  for (int t = 0; t < count; ++t) {
    const double v = 3.0 * gen.gaussian();
    const double w = std::abs(gen.gaussian());
    const double rho = 0.1 + 2.0 * gen.uniform01();
    const double got = prox::prox_weighted_l1(v, w, rho);
    auto f = [&](double z) { return w * std::abs(z) + 0.5 * rho * (z - v) * (z - v); };
    const double lo = std::min(0.0, v) - 0.5;
    const double hi = std::max(0.0, v) + 0.5;
    const double want = oracle::grid_prox_1d(f, lo, hi, (hi - lo) / 2000.0);
    res.max_abs_dev = std::max(res.max_abs_dev, std::abs(got - want));
  }
  res.pass = res.max_abs_dev <= res.tolerance;
  return res;
}

SuiteResult suite_group_prox(const std::string& name, double p, std::uint64_t seed, int count) {
  SuiteResult res{name, count, 0.0, 1e-6, false};
  rng::Rng gen(seed);
  for (int t = 0; t < count; ++t) {
    const Eigen::VectorXd v = random_vector(gen, 2, 6, 2.0);
    const double w = std::abs(gen.gaussian());
    const double rho = 0.1 + 2.0 * gen.uniform01();
    const Eigen::VectorXd got = p == 2.0 ? prox::prox_weighted_group_l2(v, w, rho)
                                         : prox::prox_weighted_group_lp(v, w, rho, p);
    const Eigen::VectorXd want = oracle::projected_gradient_prox(w, rho, p, v);
    res.max_abs_dev = std::max(res.max_abs_dev, (got - want).lpNorm<Eigen::Infinity>());
  }
  res.pass = res.max_abs_dev <= res.tolerance;
  return res;
}

SuiteResult suite_fidelity(double r, std::uint64_t seed, int count) {
  SuiteResult res{"prox_fidelity_r" + std::to_string(r).substr(0, 3), count, 0.0, 1e-6, false};
  rng::Rng gen(seed);
  for (int t = 0; t < count; ++t) {
    const double v = 3.0 * gen.gaussian();
    const double alpha = 0.1 + 2.0 * gen.uniform01();
    const double rho1 = 0.1 + 2.0 * gen.uniform01();
    double got;
    if (r == 1.0) {
      got = prox::prox_weighted_l1(v, 1.0 / alpha, rho1);
    } else if (r == 2.0) {
      got = prox::prox_fidelity_r2_scalar(v, alpha, rho1);
    } else {
      got = prox::prox_fidelity_r_general(v, alpha, rho1, r);
    }
    auto f = [&](double s) {
      const double fid = r == 1.0 ? std::abs(s) / alpha : std::pow(std::abs(s), r) / (r * alpha);
      return fid + 0.5 * rho1 * (s - v) * (s - v);
    };
    const double lo = std::min(0.0, v) - 0.5;
    const double hi = std::max(0.0, v) + 0.5;
    const double want = oracle::grid_prox_1d(f, lo, hi, (hi - lo) / 2000.0);
    res.max_abs_dev = std::max(res.max_abs_dev, std::abs(got - want));
  }
  res.pass = res.max_abs_dev <= res.tolerance;
  return res;
}

SuiteResult suite_linf(std::uint64_t seed, int count) {
  SuiteResult res{"prox_linf", count, 0.0, 1e-6, false};
  rng::Rng gen(seed);
  for (int t = 0; t < count; ++t) {
    const Eigen::VectorXd v = random_vector(gen, 2, 8, 2.0);
    const double w = 0.05 + 2.0 * gen.uniform01();
    const prox::LinfProxResult got = prox::prox_linf(v, w);
    auto f = [&](double level) { return prox::linf_level_objective(v, w, level); };
    const double peak = v.lpNorm<Eigen::Infinity>();
    const double t_want = oracle::grid_prox_1d(f, 0.0, peak, std::max(peak / 2000.0, 1e-9));
    res.max_abs_dev = std::max(res.max_abs_dev, std::abs(got.t_star - t_want));
    // Clamped output must match the level reconstruction too.
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double want_j = std::abs(v[j]) <= t_want
                                ? v[j]
                                : (v[j] > 0.0 ? t_want : -t_want);
      res.max_abs_dev = std::max(res.max_abs_dev, std::abs(got.s[j] - want_j));
    }
  }
  res.pass = res.max_abs_dev <= res.tolerance;
  return res;
}

}  // namespace

std::vector<SuiteResult> run_prox_suites(std::uint64_t seed, int count) {
  std::vector<SuiteResult> out;
  out.push_back(suite_weighted_l1(rng::mix(seed, 11), count));
  out.push_back(suite_group_prox("prox_weighted_group_l2", 2.0, rng::mix(seed, 12), count));
  out.push_back(suite_group_prox("prox_weighted_group_lp(p=1.5)", 1.5, rng::mix(seed, 13), count));
  out.push_back(suite_group_prox("prox_weighted_group_lp(p=3)", 3.0, rng::mix(seed, 14), count));
  out.push_back(suite_fidelity(1.0, rng::mix(seed, 15), count));
  out.push_back(suite_fidelity(1.5, rng::mix(seed, 16), count));
  out.push_back(suite_fidelity(2.0, rng::mix(seed, 17), count));
  out.push_back(suite_fidelity(4.0, rng::mix(seed, 18), count));
  out.push_back(suite_linf(rng::mix(seed, 19), count));
  return out;
}

bool all_pass(const std::vector<SuiteResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace gsopt::verify
