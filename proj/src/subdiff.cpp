#include "gsopt/subdiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gsopt/prox.hpp"

namespace gsopt::subdiff {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// |t| shrunk toward 0 by w; the residual left after the best choice from the
// interval [-w, w].
double box_excess(double t, double w) { return sgn(t) * std::max(std::abs(t) - w, 0.0); }

// Euclidean projection of `point` onto the dual-norm ball {||z||_pdual <= radius},
// pdual > 1. Solved through the penalized form: the penalty weight nu is
// bisected until the constraint is active (or nu = 0 already feasible).
Eigen::VectorXd project_dual_ball(const Eigen::VectorXd& point, double radius, double pdual) {
  if (pdual == 2.0) {
    const double norm = point.norm();
    return norm <= radius ? point : Eigen::VectorXd(point * (radius / norm));
  }
  auto norm_pd = [&](const Eigen::VectorXd& u) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) acc += std::pow(std::abs(u[j]), pdual);
    return std::pow(acc, 1.0 / pdual);
  };
  if (norm_pd(point) <= radius) return point;
  double lo = 0.0;
  double hi = gsopt::vector_norm_p(point, pdual / (pdual - 1.0));  // kills everything
  Eigen::VectorXd z = point;
  for (int it = 0; it < 100; ++it) {
    const double nu = 0.5 * (lo + hi);
    z = prox::prox_weighted_group_lp(point, nu, 1.0, pdual);
    const double nz = norm_pd(z);
    if (nz > radius) {
      lo = nu;
    } else {
      hi = nu;
    }
    if (std::abs(nz - radius) <= 1e-12 * std::max(1.0, radius)) break;
  }
  return z;
}

// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  int k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    css += u[static_cast<size_t>(j)];
    const double candidate = (css - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - candidate > 0.0) {
      tau = candidate;
      k = static_cast<int>(j) + 1;
    }
  }
  (void)k;
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) out[j] = std::max(v[j] - tau, 0.0);
  return out;
}

// Minimizes sum_j h_j(base_j + (C theta)_j) over the simplex, where h_j is
// t^2 for plain coordinates and max(|t| - w_j, 0)^2 for box coordinates
// (box_w_j < 0 marks a plain coordinate). Projected gradient; the objective
// is convex with Lipschitz gradient.
Eigen::VectorXd simplex_least_norm_boxed(const Eigen::MatrixXd& C, const Eigen::VectorXd& base,
                                         const Eigen::VectorXd& box_w, Eigen::VectorXd theta) {
  const Eigen::Index m = C.cols();
  if (m == 1) {
    theta.setOnes();
    return theta;
  }
  const double lipschitz = 2.0 * C.squaredNorm() + 1e-30;
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd t(base.size()), shrunk(base.size());
  for (int it = 0; it < 5000; ++it) {
    t = base + C * theta;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      shrunk[j] = box_w[j] >= 0.0 ? box_excess(t[j], box_w[j]) : t[j];
    }
    const Eigen::VectorXd grad = 2.0 * (C.transpose() * shrunk);
    const Eigen::VectorXd next = project_simplex(theta - step * grad);
    const double move = (next - theta).norm();
    theta = next;
    if (move <= 1e-14) break;
  }
  return theta;
}

}  // namespace

double phi_prime(double t, double q) {
  if (!(t > 0.0)) throw std::domain_error("phi_prime requires t > 0");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  return q * std::pow(t, q - 1.0);
}

std::vector<double> linearization_weights(const GroupedVector& x, const SupportSet& S, double p,
                                          double q) {
  std::vector<double> weights;
  weights.reserve(S.indices.size());
  for (int i : S.indices) {
    const double norm = group_norm(x, i, p);
    if (!(norm > 0.0)) {
      throw std::domain_error("linearization weight needs a nonzero group in the support");
    }
    weights.push_back(phi_prime(norm, q));
  }
  return weights;
}

FidelitySubgrad fidelity_subgradient(const ProblemSpec& problem, const GroupedVector& x,
                                     const SupportSet& S) {
  FidelitySubgrad out;
  out.residual = problem.A * x.values - problem.y;
  const Eigen::Index M = out.residual.size();
  out.dual = Eigen::VectorXd::Zero(M);

  if (problem.r.is_inf()) {
    const double peak = out.residual.lpNorm<Eigen::Infinity>();
    if (peak > 0.0) {
      const double floor = peak - kInfTieRelTol * peak;
      for (Eigen::Index k = 0; k < M; ++k) {
        if (std::abs(out.residual[k]) >= floor) out.tie_set.push_back(static_cast<int>(k));
      }
      const double mass = 1.0 / static_cast<double>(out.tie_set.size());
      for (int k : out.tie_set) out.dual[k] = sgn(out.residual[k]) * mass;
    }
  } else if (problem.r.value() == 1.0) {
    for (Eigen::Index k = 0; k < M; ++k) {
      out.dual[k] = sgn(out.residual[k]);  // sgn(0) = 0 selection
      if (out.residual[k] == 0.0) out.tie_set.push_back(static_cast<int>(k));
    }
  } else {
    const double rv = problem.r.value();
    for (Eigen::Index k = 0; k < M; ++k) {
      out.dual[k] = std::pow(std::abs(out.residual[k]), rv - 1.0) * sgn(out.residual[k]);
    }
  }

  const Eigen::MatrixXd A_S = restrict_columns(problem.A, *problem.partition, S);
  out.eta_S = (A_S.transpose() * out.dual) / problem.alpha;
  return out;
}

SubgradComponents subgradient_components(const ProblemSpec& problem,
                                         const GroupedVector& x_prev, const SupportSet& S,
                                         const std::vector<double>& weights,
                                         const GroupedVector& candidate, double beta) {
  if (weights.size() != S.indices.size()) {
    throw std::invalid_argument("weights must match the support");
  }
  const FidelitySubgrad fid = fidelity_subgradient(problem, candidate, S);
  const GroupPartition& part = *problem.partition;

  SubgradComponents out;
  out.partition = candidate.partition;
  const int N = part.total_size();
  out.zeta = Eigen::VectorXd::Zero(N);
  out.eta = Eigen::VectorXd::Zero(N);
  out.beta_term = Eigen::VectorXd::Zero(N);

  int at = 0;
  for (size_t si = 0; si < S.indices.size(); ++si) {
    const int i = S.indices[si];
    const int sz = part.group_size(i);
    const int off = part.offset(i);
    const double w = weights[si];

    out.eta.segment(off, sz) = fid.eta_S.segment(at, sz);
    out.beta_term.segment(off, sz) =
        beta * (candidate.values.segment(off, sz) - x_prev.values.segment(off, sz));
    const Eigen::VectorXd c = out.eta.segment(off, sz) + out.beta_term.segment(off, sz);

    const auto xi = candidate.values.segment(off, sz);
    const double norm_p = vector_norm_p(xi, problem.p);

    if (problem.p > 1.0) {
      if (norm_p > 0.0) {
        const double scale = w * std::pow(norm_p, 1.0 - problem.p);
        for (int j = 0; j < sz; ++j) {
          out.zeta[off + j] = scale * std::pow(std::abs(xi[j]), problem.p - 1.0) * sgn(xi[j]);
        }
      } else {
        // Whole group at zero: the regularizer's subdifferential is the
        // dual-norm ball of radius w; take the element closest to -c.
        const double pdual = problem.p / (problem.p - 1.0);
        out.zeta.segment(off, sz) = project_dual_ball(-c, w, pdual);
      }
    } else {
      for (int j = 0; j < sz; ++j) {
        if (xi[j] != 0.0) {
          out.zeta[off + j] = w * sgn(xi[j]);
        } else {
          // Interval element minimizing |u_j|.
          out.zeta[off + j] = box_excess(c[j], w) - c[j];
        }
      }
    }
    at += sz;
  }
  return out;
}

Certificate inexactness_certificate(const ProblemSpec& problem, const GroupedVector& x_prev,
                                    const SupportSet& S, const std::vector<double>& weights,
                                    const GroupedVector& candidate, double beta, double epsilon) {
  const SubgradComponents parts =
      subgradient_components(problem, x_prev, S, weights, candidate, beta);
  Certificate cert;
  cert.u_norm = (parts.zeta + parts.eta + parts.beta_term).norm();
  cert.bound = 0.5 * beta * epsilon * (candidate.values - x_prev.values).norm();
  cert.satisfied = cert.u_norm <= cert.bound;
  return cert;
}

Eigen::VectorXd least_norm_simplex(const Eigen::MatrixXd& C, const Eigen::VectorXd& base) {
  const Eigen::Index m = C.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  const Eigen::VectorXd no_boxes = Eigen::VectorXd::Constant(base.size(), -1.0);
  return simplex_least_norm_boxed(C, base, no_boxes, theta);
}

double stationarity_residual(const ProblemSpec& problem, const GroupedVector& x,
                             double zero_tol) {
  const SupportSet S = group_support(x, zero_tol);
  if (S.empty()) return 0.0;  // every group's subdifferential is the whole space

  const GroupPartition& part = *problem.partition;
  const int dim = [&] {
    int d = 0;
    for (int i : S.indices) d += part.group_size(i);
    return d;
  }();

  // Determinate regularizer part and the p = 1 interval markers.
  Eigen::VectorXd zeta_det = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd box_w = Eigen::VectorXd::Constant(dim, -1.0);
  int at = 0;
  for (int i : S.indices) {
    const int sz = part.group_size(i);
    const auto xi = x.values.segment(part.offset(i), sz);
    const double norm_p = vector_norm_p(xi, problem.p);
    const double w = phi_prime(norm_p, problem.q);
    if (problem.p > 1.0) {
      const double scale = w * std::pow(norm_p, 1.0 - problem.p);
      for (int j = 0; j < sz; ++j) {
        zeta_det[at + j] = scale * std::pow(std::abs(xi[j]), problem.p - 1.0) * sgn(xi[j]);
      }
    } else {
      for (int j = 0; j < sz; ++j) {
        if (xi[j] != 0.0) {
          zeta_det[at + j] = w * sgn(xi[j]);
        } else {
          box_w[at + j] = w;
        }
      }
    }
    at += sz;
  }

  const FidelitySubgrad fid = fidelity_subgradient(problem, x, S);

  if (problem.r.is_inf() && fid.tie_set.size() > 1) {
    // Distribute the unit dual mass over the tied residual indices by a
    // least-norm solve, interacting with any p = 1 intervals.
    const Eigen::MatrixXd A_S = restrict_columns(problem.A, part, S);
    const int ties = static_cast<int>(fid.tie_set.size());
    Eigen::MatrixXd C(dim, ties);
    for (int t = 0; t < ties; ++t) {
      const int k = fid.tie_set[static_cast<size_t>(t)];
      C.col(t) = sgn(fid.residual[k]) / problem.alpha * A_S.row(k).transpose();
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(ties, 1.0 / static_cast<double>(ties));
    theta = simplex_least_norm_boxed(C, zeta_det, box_w, theta);
    const Eigen::VectorXd t = zeta_det + C * theta;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      const double rj = box_w[j] >= 0.0 ? box_excess(t[j], box_w[j]) : t[j];
      acc += rj * rj;
    }
    return std::sqrt(acc);
  }

  double acc = 0.0;
  for (int j = 0; j < dim; ++j) {
    const double t = zeta_det[j] + fid.eta_S[j];
    const double rj = box_w[j] >= 0.0 ? box_excess(t, box_w[j]) : t;
    acc += rj * rj;
  }
  return std::sqrt(acc);
}

Eigen::VectorXd restricted_gradient(const ProblemSpec& problem, const GroupedVector& x,
                                    const SupportSet& S) {
  if (!(problem.p > 1.0) || problem.r.is_inf() || !(problem.r.value() > 1.0)) {
    throw std::invalid_argument("restricted_gradient needs p > 1 and finite r > 1");
  }
  const GroupPartition& part = *problem.partition;
  const FidelitySubgrad fid = fidelity_subgradient(problem, x, S);
  Eigen::VectorXd grad = fid.eta_S;
  int at = 0;
  for (int i : S.indices) {
    const int sz = part.group_size(i);
    const auto xi = x.values.segment(part.offset(i), sz);
    const double norm_p = vector_norm_p(xi, problem.p);
    if (!(norm_p > 0.0)) throw std::domain_error("restricted_gradient: zero group in S");
    const double scale = phi_prime(norm_p, problem.q) * std::pow(norm_p, 1.0 - problem.p);
    for (int j = 0; j < sz; ++j) {
      grad[at + j] += scale * std::pow(std::abs(xi[j]), problem.p - 1.0) * sgn(xi[j]);
    }
    at += sz;
  }
  return grad;
}

}  // namespace gsopt::subdiff
