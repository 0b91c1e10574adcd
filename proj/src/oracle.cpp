#include "gsopt/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsopt/model.hpp"

namespace gsopt::oracle {

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
}

double grid_prox_1d(const std::function<double(double)>& f, double lo, double hi,
                    double resolution) {
  if (!(lo <= hi)) throw std::invalid_argument("grid_prox_1d: lo must be <= hi");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid_prox_1d: resolution must be > 0");
  if (lo == hi) return lo;

  const long steps = std::max(1L, std::lround((hi - lo) / resolution));
  double best_t = lo;
  double best_f = f(lo);
  for (long k = 1; k <= steps; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps);
    const double ft = f(t);
    if (ft < best_f) {
      best_f = ft;
      best_t = t;
    }
  }

  // Golden-section refinement around the grid winner.
  const double h = (hi - lo) / static_cast<double>(steps);
  double a = std::max(lo, best_t - h);
  double b = std::min(hi, best_t + h);
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Eigen::VectorXd projected_gradient_prox(double weight, double rho, double p,
                                        const Eigen::VectorXd& v, double tol) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (weight < 0.0) throw std::invalid_argument("weight must be >= 0");
  const Eigen::Index n = v.size();
  if (weight == 0.0 || n == 0) return v;

  // Zero case by the subdifferential at the origin: rho*v inside the
  // weight-radius dual ball.
  const double pdual = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
  if (rho * vector_norm_p(v, pdual) <= weight) return Eigen::VectorXd::Zero(n);

  if (p == 1.0) {
    // Separable; each coordinate via the 1-D grid reference.
    Eigen::VectorXd z(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double vj = v[j];
      auto f = [&](double t) { return weight * std::abs(t) + 0.5 * rho * (t - vj) * (t - vj); };
      const double span = std::abs(vj);
      z[j] = span == 0.0 ? 0.0
                         : grid_prox_1d(f, std::min(0.0, vj), std::max(0.0, vj),
                                        std::max(span / 4000.0, 1e-12));
    }
    return z;
  }

  // Coordinates with v_j = 0 stay zero at the minimizer (their p-norm partial
  // vanishes for p > 1); eliminate them so the active problem is smooth on
  // the open orthant of v.
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (v[j] != 0.0) active.push_back(j);
  }
  const Eigen::Index m = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd va(m);
  for (Eigen::Index k = 0; k < m; ++k) va[k] = v[active[static_cast<size_t>(k)]];

  auto value = [&](const Eigen::VectorXd& z) {
    return weight * vector_norm_p(z, p) + 0.5 * rho * (z - va).squaredNorm();
  };
  auto gradient = [&](const Eigen::VectorXd& z) {
    const double norm = vector_norm_p(z, p);
    Eigen::VectorXd g = rho * (z - va);
    const double scale = weight * std::pow(norm, 1.0 - p);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double mag = std::abs(z[j]);
      if (mag > 0.0) g[j] += scale * std::pow(mag, p - 1.0) * (z[j] > 0.0 ? 1.0 : -1.0);
    }
    return g;
  };

  const double gnorm_target = tol * std::max(1.0, rho * va.norm());

  // Phase 1: monotone gradient descent with backtracking from va.
  Eigen::VectorXd z = va;
  double fz = value(z);
  double step = 1.0 / rho;
  for (int it = 0; it < 2000; ++it) {
    const Eigen::VectorXd g = gradient(z);
    const double gnorm = g.norm();
    if (gnorm <= gnorm_target) break;
    double trial_step = step;
    bool moved = false;
    for (int bt = 0; bt < 60 && !moved; ++bt) {
      const Eigen::VectorXd znew = z - trial_step * g;
      const double fnew = value(znew);
      if (fnew <= fz - 0.25 * trial_step * gnorm * gnorm) {
        z = znew;
        fz = fnew;
        step = trial_step * 1.3;
        moved = true;
      }
      trial_step *= 0.5;
    }
    if (!moved) break;
  }

  // Phase 2: damped Newton with exact curvature of the p-norm, stepping
  // inside the sign orthant of va (the minimizer keeps sgn(z_j) = sgn(v_j)).
  for (Eigen::Index j = 0; j < m; ++j) {
    if (z[j] * va[j] <= 0.0) z[j] = 1e-12 * (va[j] > 0.0 ? 1.0 : -1.0);
  }
  fz = value(z);
  for (int it = 0; it < 300; ++it) {
    const Eigen::VectorXd g = gradient(z);
    if (g.norm() <= gnorm_target) {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
      for (Eigen::Index k = 0; k < m; ++k) out[active[static_cast<size_t>(k)]] = z[k];
      return out;
    }
    const double tau = vector_norm_p(z, p);
    Eigen::VectorXd dnorm(m);  // d tau / d z_j
    for (Eigen::Index j = 0; j < m; ++j) {
      dnorm[j] = std::pow(tau, 1.0 - p) * std::pow(std::abs(z[j]), p - 1.0) *
                 (z[j] > 0.0 ? 1.0 : -1.0);
    }
    Eigen::MatrixXd hess = (1.0 - p) * std::pow(tau, -1.0) * (dnorm * dnorm.transpose());
    for (Eigen::Index j = 0; j < m; ++j) {
      hess(j, j) += (p - 1.0) * std::pow(tau, 1.0 - p) * std::pow(std::abs(z[j]), p - 2.0);
    }
    hess *= weight;
    hess.diagonal().array() += rho;

    const Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd dir = -llt.solve(g);

    // Stay strictly inside the orthant.
    double t_max = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (z[j] + t_max * dir[j] == 0.0 || (z[j] + t_max * dir[j]) * z[j] < 0.0) {
        t_max = std::min(t_max, 0.99 * z[j] / -dir[j]);
      }
    }

    // Inside the quadratic basin objective differences sink below rounding,
    // so Armijo cannot certify progress; take the plain Newton step there.
    if (g.norm() <= 1e-5 * std::max(1.0, rho * va.norm())) {
      const Eigen::VectorXd zn = z + t_max * dir;
      const double gn_new = gradient(zn).norm();
      if (gn_new >= g.norm() || zn == z) break;
      z = zn;
      fz = value(z);
      continue;
    }

    double t = std::max(t_max, 0.0);
    const double slope = g.dot(dir);
    bool moved = false;
    for (int bt = 0; bt < 60 && !moved; ++bt) {
      const Eigen::VectorXd zn = z + t * dir;
      if (value(zn) <= fz + 1e-4 * t * slope) {
        z = zn;
        fz = value(zn);
        moved = true;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (gradient(z).norm() > gnorm_target) {
    throw std::runtime_error("projected_gradient_prox: did not reach tolerance");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < m; ++k) out[active[static_cast<size_t>(k)]] = z[k];
  return out;
}

Eigen::VectorXd dense_smooth_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                   double alpha, const std::vector<int>& group_sizes,
                                   const std::vector<double>& weights, double beta,
                                   const Eigen::VectorXd& x_prev, double grad_tol) {
  const Eigen::Index n = A.cols();
  auto value = [&](const Eigen::VectorXd& x) {
    double acc = (A * x - y).squaredNorm() / (2.0 * alpha) +
                 0.5 * beta * (x - x_prev).squaredNorm();
    int at = 0;
    for (size_t gi = 0; gi < group_sizes.size(); ++gi) {
      acc += weights[gi] * x.segment(at, group_sizes[gi]).norm();
      at += group_sizes[gi];
    }
    return acc;
  };

  Eigen::VectorXd x = x_prev;
  if (x.norm() == 0.0) x = Eigen::VectorXd::Constant(n, 1e-3);

  const Eigen::MatrixXd AtA = A.transpose() * A;
  const Eigen::VectorXd Aty = A.transpose() * y;

  for (int it = 0; it < 300; ++it) {
    Eigen::VectorXd grad = (AtA * x - Aty) / alpha + beta * (x - x_prev);
    Eigen::MatrixXd hess = AtA / alpha;
    hess.diagonal().array() += beta;
    int at = 0;
    for (size_t gi = 0; gi < group_sizes.size(); ++gi) {
      const int sz = group_sizes[gi];
      const auto xi = x.segment(at, sz);
      const double norm = xi.norm();
      if (!(norm > 1e-14)) {
        throw std::runtime_error("dense_smooth_solve: a group collapsed to zero");
      }
      grad.segment(at, sz) += weights[gi] * xi / norm;
      // d^2/dx^2 of w*||x|| = w*(I/||x|| - x x^T/||x||^3)
      hess.block(at, at, sz, sz) += weights[gi] *
          (Eigen::MatrixXd::Identity(sz, sz) / norm - (xi * xi.transpose()) / (norm * norm * norm));
      at += sz;
    }
    if (grad.norm() <= grad_tol) return x;

    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    Eigen::VectorXd dir;
    if (llt.info() == Eigen::Success) {
      dir = -llt.solve(grad);
    } else {
      throw std::runtime_error("dense_smooth_solve: singular Hessian");
    }

    // Damped step: backtrack on the objective.
    double t = 1.0;
    const double fx = value(x);
    const double slope = grad.dot(dir);
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd xn = x + t * dir;
      if (value(xn) <= fx + 1e-4 * t * slope) {
        x = xn;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) throw std::runtime_error("dense_smooth_solve: line search stalled");
  }
  throw std::runtime_error("dense_smooth_solve: Newton iteration cap exceeded");
}

Eigen::VectorXd refined_grid_argmin(const std::function<double(const Eigen::VectorXd&)>& f,
                                    Eigen::VectorXd lo, Eigen::VectorXd hi, int points_per_dim,
                                    int rounds) {
  const Eigen::Index d = lo.size();
  if (d < 1 || d > 3) throw std::invalid_argument("refined_grid_argmin supports 1..3 dims");
  Eigen::VectorXd best = lo;
  double best_f = f(lo);
  for (int round = 0; round < rounds; ++round) {
    const Eigen::VectorXd span = hi - lo;
    std::vector<int> idx(static_cast<size_t>(d), 0);
    Eigen::VectorXd pt(d);
    bool done = false;
    while (!done) {
      for (Eigen::Index k = 0; k < d; ++k) {
        pt[k] = lo[k] + span[k] * static_cast<double>(idx[static_cast<size_t>(k)]) /
                            static_cast<double>(points_per_dim - 1);
      }
      const double fv = f(pt);
      if (fv < best_f) {
        best_f = fv;
        best = pt;
      }
      // odometer increment
      Eigen::Index k = 0;
      for (; k < d; ++k) {
        if (++idx[static_cast<size_t>(k)] < points_per_dim) break;
        idx[static_cast<size_t>(k)] = 0;
      }
      done = k == d;
    }
    // Shrink the box around the incumbent.
    for (Eigen::Index k = 0; k < d; ++k) {
      const double h = 2.0 * span[k] / static_cast<double>(points_per_dim - 1);
      lo[k] = best[k] - h;
      hi[k] = best[k] + h;
    }
  }
  return best;
}

}  // namespace gsopt::oracle
