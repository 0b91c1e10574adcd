#include "gsopt/datagen.hpp"

#include <algorithm>
#include <stdexcept>

#include "gsopt/rng.hpp"

namespace gsopt::datagen {

namespace {
// Stream tags for deriving independent generators from one seed.
constexpr std::uint64_t kMatrixStream = 1;
constexpr std::uint64_t kSignalStream = 2;
constexpr std::uint64_t kNoiseStream = 3;
}  // namespace

std::string noise_kind_str(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kLaplace: return "laplace";
    case NoiseKind::kUniform: return "uniform";
  }
  throw std::logic_error("unreachable");
}

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "gaussian") return NoiseKind::kGaussian;
  if (s == "laplace") return NoiseKind::kLaplace;
  if (s == "uniform") return NoiseKind::kUniform;
  throw std::invalid_argument("unknown noise kind: " + s);
}

void GenSpec::validate() const {
  if (M < 1 || N < 1 || n < 1) throw std::invalid_argument("M, N, n must be positive");
  if (N % n != 0) throw std::invalid_argument("group size n must divide N");
  if (s < 0 || s > N / n) throw std::invalid_argument("s must lie in [0, N/n]");
  if (sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (M > N) throw std::invalid_argument("expects an underdetermined system (M <= N)");
}

GroupedVector gen_signal(const GenSpec& spec) {
  spec.validate();
  const int g = spec.num_groups();
  rng::Rng gen(rng::mix(spec.seed, kSignalStream));

  // Partial Fisher-Yates draw of s distinct groups.
  std::vector<int> pool(static_cast<size_t>(g));
  for (int i = 0; i < g; ++i) pool[static_cast<size_t>(i)] = i;
  for (int i = 0; i < spec.s; ++i) {
    const int j = gen.uniform_int(i, g - 1);
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
  }
  std::vector<int> active(pool.begin(), pool.begin() + spec.s);
  std::sort(active.begin(), active.end());

  auto partition = std::make_shared<const GroupPartition>(GroupPartition::uniform(g, spec.n));
  GroupedVector x = GroupedVector::zeros(partition);
  for (int i : active) {
    auto seg = x.group(i);
    for (int j = 0; j < spec.n; ++j) seg[j] = gen.gaussian();
  }
  return x;
}

Eigen::MatrixXd gen_matrix(int M, int N, std::uint64_t seed) {
  if (M < 1 || N < M) throw std::invalid_argument("gen_matrix requires 1 <= M <= N");
  rng::Rng gen(rng::mix(seed, kMatrixStream));
  Eigen::MatrixXd Bt(N, M);  // transpose of the Gaussian draw
  for (int k = 0; k < M; ++k) {
    for (int j = 0; j < N; ++j) Bt(j, k) = gen.gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Bt);
  // Rank check: a vanishing R diagonal entry would mean a degenerate draw.
  const Eigen::MatrixXd& qrmat = qr.matrixQR();
  for (int k = 0; k < M; ++k) {
    if (std::abs(qrmat(k, k)) < 1e-12) {
      throw std::runtime_error("gen_matrix: rank-deficient Gaussian draw");
    }
  }
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, M);
  return Q.transpose();
}

Eigen::VectorXd gen_noise(int M, NoiseKind kind, std::uint64_t seed) {
  rng::Rng gen(rng::mix(seed, kNoiseStream));
  Eigen::VectorXd out(M);
  switch (kind) {
    case NoiseKind::kGaussian:
      for (int k = 0; k < M; ++k) out[k] = gen.gaussian();
      break;
    case NoiseKind::kLaplace:
      for (int k = 0; k < M; ++k) out[k] = gen.laplace_unit();
      break;
    case NoiseKind::kUniform:
      for (int k = 0; k < M; ++k) out[k] = gen.uniform_unit();
      break;
  }
  return out;
}

GeneratedProblem gen_problem(const GenSpec& spec, double alpha, double p, double q,
                             const RParam& r) {
  spec.validate();
  GroupedVector x_or = gen_signal(spec);
  Eigen::MatrixXd A = gen_matrix(spec.M, spec.N, spec.seed);
  Eigen::VectorXd y = A * x_or.values;
  if (spec.sigma > 0.0) y += spec.sigma * gen_noise(spec.M, spec.noise, spec.seed);

  ProblemSpec problem;
  problem.A = std::move(A);
  problem.y = std::move(y);
  problem.alpha = alpha;
  problem.p = p;
  problem.q = q;
  problem.r = r;
  problem.partition = x_or.partition;
  problem.validate();
  return GeneratedProblem{std::move(problem), std::move(x_or)};
}

}  // namespace gsopt::datagen
