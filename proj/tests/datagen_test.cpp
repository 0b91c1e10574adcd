#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gsopt/datagen.hpp"
#include "gsopt/model.hpp"
#include "gsopt/rng.hpp"

using namespace gsopt;
using namespace gsopt::datagen;

TEST_SUITE_BEGIN("datagen");

TEST_CASE("gen_matrix has orthonormal rows spanning the draw") {
  const Eigen::MatrixXd A = gen_matrix(16, 48, 3);
  CHECK((A * A.transpose() - Eigen::MatrixXd::Identity(16, 16)).norm() <= 1e-10);

  // Square case: fully orthogonal.
  const Eigen::MatrixXd Q = gen_matrix(8, 8, 4);
  CHECK((Q * Q.transpose() - Eigen::MatrixXd::Identity(8, 8)).norm() <= 1e-10);
  CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(8, 8)).norm() <= 1e-10);

  CHECK_THROWS_AS(gen_matrix(6, 4, 1), std::invalid_argument);
}

TEST_CASE("gen_matrix preserves the row space") {
  // Rebuild the Gaussian draw with the same stream and compare projectors.
  const int M = 4, N = 6;
  const Eigen::MatrixXd A = gen_matrix(M, N, 11);

  rng::Rng gen(rng::mix(11, 1));  // matrix stream tag
  Eigen::MatrixXd Bt(N, M);
  for (int k = 0; k < M; ++k) {
    for (int j = 0; j < N; ++j) Bt(j, k) = gen.gaussian();
  }
  const Eigen::MatrixXd B = Bt.transpose();

  // Projector onto the row space of B equals A^T A for orthonormal-row A.
  const Eigen::MatrixXd P_B =
      B.transpose() * (B * B.transpose()).ldlt().solve(B);
  CHECK((A.transpose() * A - P_B).norm() <= 1e-9);
}

TEST_CASE("gen_signal support and determinism") {
  GenSpec spec{32, 64, 4, 0, 0.0, NoiseKind::kGaussian, 5};
  CHECK(gen_signal(spec).values.norm() == 0.0);

  spec.s = 16;  // all groups active
  const GroupedVector full = gen_signal(spec);
  CHECK(group_support(full, 0.0).size() == 16);

  spec.s = 5;
  const GroupedVector a = gen_signal(spec);
  const GroupedVector b = gen_signal(spec);
  CHECK(a.values == b.values);  // bit-for-bit
  CHECK(group_support(a, 0.0).size() == 5);
  for (int i : group_support(a, 0.0).indices) CHECK(a.group(i).norm() > 0.0);

  spec.seed = 6;
  CHECK(gen_signal(spec).values != a.values);
}

TEST_CASE("noise kinds are unit variance") {
  const int M = 1'000'000;
  for (const auto kind : {NoiseKind::kGaussian, NoiseKind::kLaplace, NoiseKind::kUniform}) {
    const Eigen::VectorXd n = gen_noise(M, kind, 12);
    const double mean = n.mean();
    const double var = (n.array() - mean).square().sum() / (M - 1);
    CHECK(std::abs(var - 1.0) < 0.01);
    CHECK(std::abs(mean) < 0.005);
  }
  // Determinism.
  CHECK(gen_noise(100, NoiseKind::kLaplace, 9) == gen_noise(100, NoiseKind::kLaplace, 9));
}

TEST_CASE("laplace is heavier tailed than gaussian") {
  const int M = 1'000'000;
  auto kurtosis = [&](const Eigen::VectorXd& n) {
    const double mean = n.mean();
    const double var = (n.array() - mean).square().sum() / M;
    const double fourth = (n.array() - mean).pow(4).sum() / M;
    return fourth / (var * var);
  };
  const double k_laplace = kurtosis(gen_noise(M, NoiseKind::kLaplace, 13));
  const double k_gauss = kurtosis(gen_noise(M, NoiseKind::kGaussian, 13));
  CHECK(k_laplace > k_gauss);
  CHECK(k_gauss == doctest::Approx(3.0).epsilon(0.05));
  CHECK(k_laplace == doctest::Approx(6.0).epsilon(0.1));
}

TEST_CASE("gen_problem assembles measurements") {
  GenSpec spec{16, 32, 4, 3, 0.0, NoiseKind::kGaussian, 21};
  auto noiseless = gen_problem(spec, 0.01, 2.0, 0.5, RParam::finite(2.0));
  CHECK((noiseless.problem.y - noiseless.problem.A * noiseless.x_or.values).norm() == 0.0);

  spec.sigma = 0.05;
  spec.noise = NoiseKind::kUniform;
  auto uniform = gen_problem(spec, 0.01, 2.0, 0.5, RParam::finite(2.0));
  const Eigen::VectorXd diff = uniform.problem.y - uniform.problem.A * uniform.x_or.values;
  CHECK(diff.lpNorm<Eigen::Infinity>() <= spec.sigma * std::sqrt(3.0) + 1e-12);

  // Fidelity of the ground truth is O(sigma^2) for r = 2.
  spec.noise = NoiseKind::kGaussian;
  auto noisy = gen_problem(spec, 1.0, 2.0, 0.5, RParam::finite(2.0));
  const double fid = fidelity(noisy.problem, noisy.x_or);
  CHECK(fid > 0.0);
  CHECK(fid <= 0.5 * spec.sigma * spec.sigma * spec.M * 4.0);  // (1/2a)||sigma n||^2, slack 4x

  // Identical spec implies an identical problem.
  auto again = gen_problem(spec, 1.0, 2.0, 0.5, RParam::finite(2.0));
  CHECK(again.problem.y == noisy.problem.y);
  CHECK(again.problem.A == noisy.problem.A);
}

TEST_CASE("spec validation") {
  GenSpec bad{16, 33, 4, 2, 0.0, NoiseKind::kGaussian, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // n does not divide N
  bad = GenSpec{16, 32, 4, 9, 0.0, NoiseKind::kGaussian, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // s > N/n
  bad = GenSpec{40, 32, 4, 2, 0.0, NoiseKind::kGaussian, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);  // M > N
  CHECK_THROWS_AS(parse_noise_kind("cauchy"), std::invalid_argument);
}

TEST_SUITE_END();
