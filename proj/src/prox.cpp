#include "gsopt/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gsopt::prox {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Root of  a*t^(p-1) + rho*t - rho*target = 0  on [0, target] for target > 0.
// Strictly increasing in t, so a bisection/Newton hybrid is safe.
double shrunk_magnitude(double a, double rho, double target, double p) {
  double lo = 0.0, hi = target;
  auto g = [&](double t) { return a * std::pow(t, p - 1.0) + rho * (t - target); };
  double t = 0.5 * target;
  for (int it = 0; it < 200; ++it) {
    const double gt = g(t);
    if (gt > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double dg = a * (p - 1.0) * std::pow(t, p - 2.0) + rho;
    double next = t - gt / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-17 * std::max(1.0, target)) return next;
    t = next;
  }
  return t;
}

}  // namespace

double prox_weighted_l1(double v, double weight, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (weight < 0.0) throw std::invalid_argument("weight must be >= 0");
  return sgn(v) * std::max(std::abs(v) - weight / rho, 0.0);
}

Eigen::VectorXd prox_weighted_group_l2(const Eigen::VectorXd& v, double weight, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (weight < 0.0) throw std::invalid_argument("weight must be >= 0");
  const double norm = v.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(v.size());
  const double scale = std::max(norm - weight / rho, 0.0) / norm;
  return scale * v;
}

Eigen::VectorXd prox_weighted_group_lp(const Eigen::VectorXd& v, double weight, double rho,
                                       double p) {
  if (!(p > 1.0)) throw std::invalid_argument("group lp prox requires p > 1");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (weight < 0.0) throw std::invalid_argument("weight must be >= 0");
  const Eigen::Index n = v.size();
  if (weight == 0.0 || n == 0) return v;

  // Zero iff rho*v lies in the weight-radius dual-norm ball.
  const double pdual = p / (p - 1.0);
  double dual_norm = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) dual_norm += std::pow(std::abs(v[j]), pdual);
  dual_norm = std::pow(dual_norm, 1.0 / pdual);
  if (rho * dual_norm <= weight) return Eigen::VectorXd::Zero(n);

  // Stationarity:  weight*tau^(1-p)*|z_j|^(p-1)*sgn(z_j) + rho*(z_j - v_j) = 0
  // with tau = ||z||_p. For fixed tau every coordinate is a monotone 1-D
  // root; the map tau -> ||z(tau)||_p is increasing, so its fixed point is
  // found by bisection.
  auto z_of_tau = [&](double tau, Eigen::VectorXd& z) {
    const double a = weight * std::pow(tau, 1.0 - p);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double mag = std::abs(v[j]);
      z[j] = mag == 0.0 ? 0.0 : sgn(v[j]) * shrunk_magnitude(a, rho, mag, p);
    }
  };
  auto norm_p = [&](const Eigen::VectorXd& z) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) acc += std::pow(std::abs(z[j]), p);
    return std::pow(acc, 1.0 / p);
  };

  Eigen::VectorXd z(n);
  double hi = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) hi += std::pow(std::abs(v[j]), p);
  hi = std::pow(hi, 1.0 / p);

  double lo = hi;
  int guard = 0;
  for (; guard < 200; ++guard) {
    z_of_tau(lo, z);
    if (norm_p(z) - lo > 0.0) break;
    lo *= 0.5;
    if (lo < 1e-300) break;
  }
  if (guard >= 200) {
    throw std::runtime_error("prox_weighted_group_lp: failed to bracket the norm fixed point");
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    z_of_tau(mid, z);
    if (norm_p(z) - mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  z_of_tau(0.5 * (lo + hi), z);

  // Verify first-order optimality.
  const double tau = norm_p(z);
  double grad_sq = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double gj = weight * std::pow(tau, 1.0 - p) * std::pow(std::abs(z[j]), p - 1.0) *
                          sgn(z[j]) +
                      rho * (z[j] - v[j]);
    grad_sq += gj * gj;
  }
  const double scale = std::max(1.0, rho * v.norm());
  if (std::sqrt(grad_sq) > 1e-10 * scale) {
    std::ostringstream os;
    os << "prox_weighted_group_lp: gradient norm " << std::sqrt(grad_sq)
       << " above tolerance (p=" << p << ", weight=" << weight << ", rho=" << rho << ")";
    throw std::runtime_error(os.str());
  }
  return z;
}

double prox_fidelity_r2_scalar(double v, double alpha, double rho1) {
  return alpha * rho1 * v / (1.0 + alpha * rho1);
}

Eigen::VectorXd prox_fidelity_r2(const Eigen::VectorXd& v, double alpha, double rho1) {
  if (!(alpha > 0.0) || !(rho1 > 0.0)) throw std::invalid_argument("alpha, rho1 must be positive");
  return (alpha * rho1 / (1.0 + alpha * rho1)) * v;
}

double prox_fidelity_r_general(double v, double alpha, double rho1, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("prox_fidelity_r_general requires r > 1");
  if (!(alpha > 0.0) || !(rho1 > 0.0)) throw std::invalid_argument("alpha, rho1 must be positive");
  if (v == 0.0) return 0.0;
  if (r == 2.0) return prox_fidelity_r2_scalar(v, alpha, rho1);

  const double target = std::abs(v);
  // Derivative (1/alpha) s^(r-1) + rho1 (s - target) on s in [0, target]:
  // negative at 0+, positive at target, strictly increasing.
  double lo = 0.0, hi = target;
  double s = 0.5 * target;
  auto deriv = [&](double t) { return std::pow(t, r - 1.0) / alpha + rho1 * (t - target); };
  const double tol = 1e-12 * std::max(1.0, rho1 * target);
  for (int it = 0; it < 100; ++it) {
    const double d = deriv(s);
    if (std::abs(d) <= tol) return sgn(v) * s;
    if (d > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double d2 = (r - 1.0) * std::pow(s, r - 2.0) / alpha + rho1;
    double next = s - d / d2;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  if (std::abs(deriv(s)) > tol) {
    throw std::runtime_error("prox_fidelity_r_general: Newton iteration cap exceeded");
  }
  return sgn(v) * s;
}

double linf_level_objective(const Eigen::VectorXd& v, double quad_weight, double t) {
  double acc = t;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::abs(v[j]);
    if (mag > t) acc += quad_weight * (mag - t) * (mag - t);
  }
  return acc;
}

LinfProxResult prox_linf(const Eigen::VectorXd& v, double quad_weight) {
  if (!(quad_weight > 0.0)) throw std::invalid_argument("quad_weight must be positive");
  const Eigen::Index n = v.size();
  LinfProxResult out;
  out.s = Eigen::VectorXd::Zero(n);
  if (n == 0) return out;

  std::vector<double> mags(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) mags[static_cast<size_t>(j)] = std::abs(v[j]);
  std::stable_sort(mags.begin(), mags.end());

  // Derivative at 0+: 1 - 2*quad_weight*sum|v_j|. Nonnegative forces t* = 0.
  const double total = std::accumulate(mags.begin(), mags.end(), 0.0);
  if (1.0 - 2.0 * quad_weight * total >= 0.0) {
    out.t_star = 0.0;
    out.i_star = -1;
    return out;  // s stays zero
  }

  // t_k = (suffix_sum(k) - 1/(2w)) / (n - k) must land in
  // [sorted[k-1], sorted[k]] (with sorted[-1] := 0).
  double suffix = total;
  bool found = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t_k = (suffix - 0.5 / quad_weight) / static_cast<double>(n - k);
    const double lo = k == 0 ? 0.0 : mags[static_cast<size_t>(k - 1)];
    const double hi = mags[static_cast<size_t>(k)];
    if (t_k >= lo && t_k <= hi) {
      out.t_star = t_k;
      out.i_star = static_cast<int>(k);
      found = true;
      break;
    }
    suffix -= mags[static_cast<size_t>(k)];
  }
  if (!found) {
    // Convexity guarantees an interval contains the stationary level.
    throw std::logic_error("prox_linf: no valid interval found");
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(v[j]);
    out.s[j] = mag <= out.t_star ? v[j] : sgn(v[j]) * out.t_star;
  }
  return out;
}

}  // namespace gsopt::prox
