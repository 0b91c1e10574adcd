#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "gsopt/model.hpp"

namespace gsopt::datagen {

enum class NoiseKind { kGaussian, kLaplace, kUniform };

std::string noise_kind_str(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& s);

// Synthetic instance recipe: M x N row-orthonormal sensing matrix, uniform
// groups of size n, s active groups, noise level sigma. All randomness flows
// through `seed`.
struct GenSpec {
  int M = 256;
  int N = 1024;
  int n = 8;  // uniform group size; must divide N
  int s = 8;  // number of nonzero groups
  double sigma = 0.001;
  NoiseKind noise = NoiseKind::kGaussian;
  std::uint64_t seed = 0;

  int num_groups() const { return N / n; }
  void validate() const;
};

// s groups chosen uniformly at random without replacement, filled with
// i.i.d. standard Gaussian entries; every other group exactly zero.
GroupedVector gen_signal(const GenSpec& spec);

// Row-orthonormalized Gaussian matrix: draws B with i.i.d. N(0,1) entries and
// returns A with orthonormal rows spanning the row space of B.
Eigen::MatrixXd gen_matrix(int M, int N, std::uint64_t seed);

// Unit-variance noise of the requested kind.
Eigen::VectorXd gen_noise(int M, NoiseKind kind, std::uint64_t seed);

struct GeneratedProblem {
  ProblemSpec problem;
  GroupedVector x_or;  // ground truth
};

// y = A x_or + sigma * noise, assembled into a full instance.
GeneratedProblem gen_problem(const GenSpec& spec, double alpha, double p, double q,
                             const RParam& r);

}  // namespace gsopt::datagen
