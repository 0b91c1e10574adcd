#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gsopt/admm.hpp"
#include "gsopt/datagen.hpp"
#include "gsopt/model.hpp"
#include "gsopt/oracle.hpp"
#include "gsopt/prox.hpp"
#include "gsopt/rng.hpp"

using namespace gsopt;

namespace {

PartitionPtr make_partition(std::vector<int> sizes) {
  return std::make_shared<const GroupPartition>(std::move(sizes));
}

// Scalar subproblem w|x| + (1/(2a))(cx - y)^2 + (b/2)(x - xp)^2.
double scalar_minimizer(double w, double a, double c, double y, double b, double xp) {
  const double denom = c * c / a + b;
  const double pos = (c * y / a + b * xp - w) / denom;
  if (pos > 0.0) return pos;
  const double neg = (c * y / a + b * xp + w) / denom;
  if (neg < 0.0) return neg;
  return 0.0;
}

struct ScalarSetup {
  ProblemSpec problem;
  GroupedVector x_prev;
  std::vector<double> weights;
  double beta;
};

ScalarSetup scalar_setup(double w, double a, double c, double y, double b, double xp) {
  ScalarSetup s{{}, GroupedVector::zeros(make_partition({1})), {w}, b};
  s.problem.partition = s.x_prev.partition;
  s.problem.A.resize(1, 1);
  s.problem.A << c;
  s.problem.y.resize(1);
  s.problem.y << y;
  s.problem.alpha = a;
  s.problem.p = 2.0;
  s.problem.q = 0.5;
  s.problem.r = RParam::finite(2.0);
  s.x_prev.values << xp;
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("admm");

TEST_CASE("setup initializes the split consistently") {
  rng::Rng gen(71);
  auto part = make_partition({2, 2, 2});
  ProblemSpec problem;
  problem.partition = part;
  problem.A.resize(4, 6);
  problem.y.resize(4);
  for (int k = 0; k < 4; ++k) {
    problem.y[k] = gen.gaussian();
    for (int j = 0; j < 6; ++j) problem.A(k, j) = gen.gaussian();
  }
  problem.alpha = 0.5;
  problem.validate();

  GroupedVector x_prev(Eigen::VectorXd::Ones(6), part);
  const SupportSet S = SupportSet::all(3);
  const std::vector<double> weights{0.3, 0.2, 0.5};
  auto st = admm::admm_setup(problem, S, weights, 0.1, x_prev, 1.0, 1.0);

  // The s-constraint holds exactly at initialization.
  CHECK((st.A_S * st.x_bar - st.y - st.s).norm() == 0.0);
  CHECK(st.z == st.x_bar);
  CHECK(st.lambda.norm() == 0.0);
  CHECK(st.mu.norm() == 0.0);
  CHECK(st.factorizations == 1);
}

TEST_CASE("normal matrix is SPD for orthonormal rows") {
  const Eigen::MatrixXd A = datagen::gen_matrix(4, 6, 5);
  auto part = make_partition({3, 3});
  ProblemSpec problem;
  problem.partition = part;
  problem.A = A;
  problem.y = Eigen::VectorXd::Zero(4);
  problem.validate();
  GroupedVector x_prev(Eigen::VectorXd::Ones(6), part);
  auto st = admm::admm_setup(problem, SupportSet::all(2), {1.0, 1.0}, 0.0, x_prev, 1.0, 1.0);

  // rho1 A^T A + (rho2 + beta) I has eigenvalues in [1, 2] here.
  Eigen::MatrixXd H = st.A_S.transpose() * st.A_S;
  H.diagonal().array() += 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  CHECK(eig.eigenvalues().minCoeff() >= 1.0 - 1e-12);
  CHECK(eig.eigenvalues().maxCoeff() <= 2.0 + 1e-12);

  // The cached solve inverts it to machine precision.
  Eigen::VectorXd b(6);
  for (int j = 0; j < 6; ++j) b[j] = j + 1;
  const Eigen::VectorXd x = st.solve_normal(b);
  CHECK((H * x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("empty support degenerates cleanly") {
  auto part = make_partition({2, 2});
  ProblemSpec problem;
  problem.partition = part;
  problem.A = Eigen::MatrixXd::Identity(4, 4);
  problem.y = Eigen::VectorXd::Ones(4);
  problem.validate();
  GroupedVector x_prev = GroupedVector::zeros(part);
  auto st = admm::admm_setup(problem, SupportSet{}, {}, 0.0, x_prev, 1.0, 1.0);
  admm::AdmmParams params{problem.alpha, 2.0, problem.r, {}};
  const auto res = admm::admm_solve(st, params, {});
  CHECK(res.x.size() == 0);
  CHECK(res.report.converged);
  CHECK(res.report.iterations == 0);
}

TEST_CASE("analytic fixed point is preserved by one step") {
  const double w = 0.4, a = 0.8, c = 1.3, y = 2.0, b = 0.25, xp = 0.6;
  const double rho1 = 1.1, rho2 = 0.9;
  ScalarSetup s = scalar_setup(w, a, c, y, b, xp);
  const double x_star = scalar_minimizer(w, a, c, y, b, xp);
  REQUIRE(x_star > 0.0);

  auto st = admm::admm_setup(s.problem, SupportSet::all(1), s.weights, s.beta, s.x_prev,
                             rho1, rho2);
  // Assemble the stationary splitting by hand.
  st.x_bar[0] = x_star;
  st.z[0] = x_star;
  st.s[0] = c * x_star - y;
  st.lambda[0] = st.s[0] / (a * rho1);
  st.mu[0] = w / rho2;  // sgn(x_star) = +1
  st.Ax = st.A_S * st.x_bar;

  admm::AdmmParams params{a, 2.0, RParam::finite(2.0), s.weights};
  const double x0 = st.x_bar[0], z0 = st.z[0], s0 = st.s[0], l0 = st.lambda[0], m0 = st.mu[0];
  admm::admm_step(st, params);
  CHECK(st.x_bar[0] == doctest::Approx(x0).epsilon(1e-12));
  CHECK(st.z[0] == doctest::Approx(z0).epsilon(1e-12));
  CHECK(st.s[0] == doctest::Approx(s0).epsilon(1e-12));
  CHECK(st.lambda[0] == doctest::Approx(l0).epsilon(1e-12));
  CHECK(st.mu[0] == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("scalar problem converges to the closed form") {
  const double w = 0.3, a = 0.6, c = 1.7, y = -1.5, b = 0.1, xp = -0.2;
  ScalarSetup s = scalar_setup(w, a, c, y, b, xp);
  const double x_star = scalar_minimizer(w, a, c, y, b, xp);

  auto st = admm::admm_setup(s.problem, SupportSet::all(1), s.weights, s.beta, s.x_prev, 1.0,
                             1.0);
  admm::AdmmParams params{a, 2.0, RParam::finite(2.0), s.weights};
  const auto res = admm::admm_solve(st, params, {1e-10, 1e-10, 200});
  CHECK(res.report.iterations <= 200);
  CHECK(std::abs(res.x[0] - x_star) <= 1e-6);
}

TEST_CASE("x update satisfies its linear system") {
  rng::Rng gen(72);
  auto part = make_partition({2, 2});
  ProblemSpec problem;
  problem.partition = part;
  problem.A = datagen::gen_matrix(3, 4, 9);
  problem.y.resize(3);
  problem.y << 1, -2, 0.5;
  problem.alpha = 0.4;
  problem.validate();
  GroupedVector x_prev(Eigen::VectorXd::Ones(4), part);
  auto st = admm::admm_setup(problem, SupportSet::all(2), {0.5, 0.7}, 0.2, x_prev, 1.3, 0.8);
  admm::AdmmParams params{problem.alpha, 2.0, RParam::finite(2.0), {0.5, 0.7}};

  for (int it = 0; it < 5; ++it) {
    const Eigen::VectorXd z_before = st.z;  // the step updates z and s first
    admm::admm_step(st, params);
    // Reconstruct the rhs the x update solved against. lambda and mu were
    // advanced after the solve, so rewind them.
    const Eigen::VectorXd lambda_pre = st.lambda - (st.Ax - st.y - st.s);
    const Eigen::VectorXd mu_pre = st.mu - (st.x_bar - st.z);
    const Eigen::VectorXd rhs =
        1.3 * (st.A_S.transpose() * (st.y + st.s - lambda_pre)) + 0.8 * (st.z - mu_pre) +
        0.2 * st.x_prev;
    Eigen::MatrixXd H = 1.3 * (st.A_S.transpose() * st.A_S);
    H.diagonal().array() += 0.8 + 0.2;
    CHECK((H * st.x_bar - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("zero data collapses to zero") {
  auto part = make_partition({2, 2});
  ProblemSpec problem;
  problem.partition = part;
  problem.A = datagen::gen_matrix(3, 4, 2);
  problem.y = Eigen::VectorXd::Zero(3);
  problem.validate();
  GroupedVector x_prev(Eigen::VectorXd::Ones(4), part);
  auto st = admm::admm_setup(problem, SupportSet::all(2), {0.4, 0.4}, 0.0, x_prev, 1.0, 1.0);
  admm::AdmmParams params{problem.alpha, 2.0, RParam::finite(2.0), {0.4, 0.4}};
  const auto res = admm::admm_solve(st, params, {1e-8, 1e-8, 5000});
  CHECK(res.report.converged);
  CHECK(res.x.norm() <= 1e-6);
}

TEST_CASE("agrees with the dense smooth reference") {
  rng::Rng gen(73);
  for (int trial = 0; trial < 5; ++trial) {
    auto part = make_partition({4, 4, 4, 4, 4, 4, 4, 4});
    const Eigen::MatrixXd A = datagen::gen_matrix(16, 32, 100 + trial);
    Eigen::VectorXd x_true = Eigen::VectorXd::Zero(32);
    for (int j = 0; j < 32; ++j) x_true[j] = 1.0 + 0.3 * gen.gaussian();
    ProblemSpec problem;
    problem.partition = part;
    problem.A = A;
    problem.y = A * x_true;
    problem.alpha = 0.5;
    problem.validate();

    GroupedVector x_prev(x_true, part);
    const std::vector<double> weights(8, 0.05);
    const double beta = 0.05;
    auto st = admm::admm_setup(problem, SupportSet::all(8), weights, beta, x_prev, 1.0, 1.0);
    admm::AdmmParams params{problem.alpha, 2.0, RParam::finite(2.0), weights};
    const auto res = admm::admm_solve(st, params, {1e-9, 1e-9, 20000});
    REQUIRE(res.report.converged);

    const Eigen::VectorXd want = oracle::dense_smooth_solve(
        A, problem.y, problem.alpha, {4, 4, 4, 4, 4, 4, 4, 4}, weights, beta, x_true, 1e-11);
    CHECK((res.x - want).norm() <= 1e-4 * want.norm());
    CHECK(st.factorizations == 1);  // one factorization for the whole solve
  }
}

TEST_CASE("r=inf subproblem matches an exhaustive reference on a tiny instance") {
  rng::Rng gen(74);
  auto part = make_partition({1, 1});
  Eigen::MatrixXd A(8, 2);
  Eigen::VectorXd y(8);
  for (int k = 0; k < 8; ++k) {
    y[k] = gen.gaussian();
    for (int j = 0; j < 2; ++j) A(k, j) = gen.gaussian();
  }
  ProblemSpec problem;
  problem.partition = part;
  problem.A = A;
  problem.y = y;
  problem.alpha = 0.5;
  problem.r = RParam::inf();
  problem.validate();

  Eigen::VectorXd xp(2);
  xp << 0.3, -0.2;
  GroupedVector x_prev(xp, part);
  const std::vector<double> weights{0.2, 0.3};
  const double beta = 0.1;

  auto st = admm::admm_setup(problem, SupportSet::all(2), weights, beta, x_prev, 1.0, 1.0);
  admm::AdmmParams params{problem.alpha, 2.0, RParam::inf(), weights};
  const auto res = admm::admm_solve(st, params, {1e-9, 1e-9, 50000});
  REQUIRE(res.report.converged);

  auto h = [&](const Eigen::VectorXd& x) {
    return weights[0] * std::abs(x[0]) + weights[1] * std::abs(x[1]) +
           (A * x - y).lpNorm<Eigen::Infinity>() / problem.alpha +
           0.5 * beta * (x - xp).squaredNorm();
  };
  Eigen::VectorXd lo(2), hi(2);
  lo << -3, -3;
  hi << 3, 3;
  const Eigen::VectorXd grid_best = oracle::refined_grid_argmin(h, lo, hi, 201, 5);
  CHECK(h(res.x) <= h(grid_best) + 1e-4);
  CHECK(std::abs(h(res.x) - h(grid_best)) <= 1e-4);
}

TEST_CASE("subproblem objective is non-increasing near convergence") {
  rng::Rng gen(75);
  auto part = make_partition({2, 2, 2, 2});
  const Eigen::MatrixXd A = datagen::gen_matrix(6, 8, 42);
  Eigen::VectorXd x_true(8);
  for (int j = 0; j < 8; ++j) x_true[j] = gen.gaussian();
  ProblemSpec problem;
  problem.partition = part;
  problem.A = A;
  problem.y = A * x_true;
  problem.alpha = 0.8;
  problem.validate();

  GroupedVector x_prev(Eigen::VectorXd::Ones(8), part);
  const std::vector<double> weights(4, 0.2);
  auto st = admm::admm_setup(problem, SupportSet::all(4), weights, 0.1, x_prev, 1.0, 1.0);
  admm::AdmmParams params{problem.alpha, 2.0, RParam::finite(2.0), weights};

  // Converge, then monitor the last 10 sweeps.
  admm::admm_solve(st, params, {1e-6, 1e-6, 5000});
  double prev = admm::subproblem_objective(st, params, st.x_bar);
  for (int it = 0; it < 10; ++it) {
    admm::admm_step(st, params);
    const double now = admm::subproblem_objective(st, params, st.x_bar);
    CHECK(now <= prev + 1e-8 * (1.0 + std::abs(prev)));
    prev = now;
  }
}

TEST_SUITE_END();
