#include "gsopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gsopt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RParam RParam::finite(double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw std::invalid_argument("fidelity exponent r must be finite and >= 1");
  }
  RParam out;
  out.value_ = r;
  out.inf_ = false;
  return out;
}

RParam RParam::inf() {
  RParam out;
  out.inf_ = true;
  out.value_ = kInf;
  return out;
}

double RParam::value() const {
  if (inf_) throw std::logic_error("RParam::value() called on r = inf");
  return value_;
}

std::string RParam::str() const {
  if (inf_) return "inf";
  std::ostringstream os;
  os << value_;
  return os.str();
}

RParam RParam::parse(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return inf();
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("cannot parse r value: " + s);
  return finite(v);
}

GroupPartition::GroupPartition(std::vector<int> group_sizes) : sizes_(std::move(group_sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("partition needs at least one group");
  offsets_.reserve(sizes_.size());
  total_ = 0;
  for (int sz : sizes_) {
    if (sz < 1) throw std::invalid_argument("every group size must be >= 1");
    offsets_.push_back(total_);
    total_ += sz;
  }
}

GroupPartition GroupPartition::uniform(int num_groups, int group_size) {
  if (num_groups < 1 || group_size < 1) {
    throw std::invalid_argument("uniform partition needs positive counts");
  }
  return GroupPartition(std::vector<int>(static_cast<size_t>(num_groups), group_size));
}

GroupedVector::GroupedVector(Eigen::VectorXd v, PartitionPtr part)
    : values(std::move(v)), partition(std::move(part)) {
  if (!partition) throw std::invalid_argument("GroupedVector needs a partition");
  if (values.size() != partition->total_size()) {
    throw std::invalid_argument("vector length does not match partition");
  }
}

GroupedVector GroupedVector::zeros(PartitionPtr part) {
  if (!part) throw std::invalid_argument("GroupedVector needs a partition");
  const int n = part->total_size();
  return GroupedVector(Eigen::VectorXd::Zero(n), std::move(part));
}

SupportSet SupportSet::all(int num_groups) {
  SupportSet out;
  out.indices.resize(static_cast<size_t>(num_groups));
  for (int i = 0; i < num_groups; ++i) out.indices[static_cast<size_t>(i)] = i;
  return out;
}

SupportSet SupportSet::of(std::vector<int> idx, int num_groups) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (!idx.empty() && (idx.front() < 0 || idx.back() >= num_groups)) {
    throw std::invalid_argument("support index out of range");
  }
  SupportSet out;
  out.indices = std::move(idx);
  return out;
}

bool SupportSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

bool SupportSet::subset_of(const SupportSet& other) const {
  return std::includes(other.indices.begin(), other.indices.end(), indices.begin(),
                       indices.end());
}

void ProblemSpec::validate() const {
  if (!partition) throw std::invalid_argument("problem needs a partition");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be finite, >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (A.cols() != partition->total_size()) {
    throw std::invalid_argument("A column count does not match partition");
  }
  if (y.size() != A.rows()) throw std::invalid_argument("y length does not match A rows");
}

double vector_norm_p(const Eigen::VectorXd& v, double p) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.lpNorm<Eigen::Infinity>();
  if (p == 1.0) return v.lpNorm<1>();
  if (p == 2.0) return v.norm();
  if (!(p >= 1.0)) throw std::invalid_argument("norm exponent must be >= 1");
  // Scaled to avoid overflow for large exponents.
  const double peak = v.lpNorm<Eigen::Infinity>();
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) acc += std::pow(std::abs(v[j]) / peak, p);
  return peak * std::pow(acc, 1.0 / p);
}

double group_norm(const GroupedVector& x, int i, double p) {
  if (i < 0 || i >= x.partition->num_groups()) {
    throw std::invalid_argument("group index out of range");
  }
  return vector_norm_p(x.group(i), p);
}

SupportSet group_support(const GroupedVector& x, double zero_tol) {
  if (zero_tol < 0.0) throw std::invalid_argument("zero_tol must be >= 0");
  SupportSet out;
  const int g = x.partition->num_groups();
  for (int i = 0; i < g; ++i) {
    if (x.group(i).lpNorm<Eigen::Infinity>() > zero_tol) out.indices.push_back(i);
  }
  return out;
}

double fidelity_of_residual(const Eigen::VectorXd& residual, double alpha, const RParam& r) {
  if (r.is_inf()) return residual.lpNorm<Eigen::Infinity>() / alpha;
  const double rv = r.value();
  if (rv == 2.0) return residual.squaredNorm() / (2.0 * alpha);
  if (rv == 1.0) return residual.lpNorm<1>() / alpha;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < residual.size(); ++k) acc += std::pow(std::abs(residual[k]), rv);
  return acc / (rv * alpha);
}

double fidelity(const ProblemSpec& problem, const GroupedVector& x) {
  return fidelity_of_residual(problem.A * x.values - problem.y, problem.alpha, problem.r);
}

double objective(const ProblemSpec& problem, const GroupedVector& x) {
  double reg = 0.0;
  const int g = x.partition->num_groups();
  for (int i = 0; i < g; ++i) {
    const double norm = group_norm(x, i, problem.p);
    if (norm > 0.0) reg += std::pow(norm, problem.q);
  }
  return reg + fidelity(problem, x);
}

Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& A, const GroupPartition& partition,
                                 const SupportSet& S) {
  if (A.cols() != partition.total_size()) {
    throw std::invalid_argument("matrix does not match partition");
  }
  if (!S.indices.empty() &&
      (S.indices.front() < 0 || S.indices.back() >= partition.num_groups())) {
    throw std::invalid_argument("support index out of range");
  }
  int cols = 0;
  for (int i : S.indices) cols += partition.group_size(i);
  Eigen::MatrixXd out(A.rows(), cols);
  int at = 0;
  for (int i : S.indices) {
    const int sz = partition.group_size(i);
    out.middleCols(at, sz) = A.middleCols(partition.offset(i), sz);
    at += sz;
  }
  return out;
}

Eigen::VectorXd restrict_values(const Eigen::VectorXd& x, const GroupPartition& partition,
                                const SupportSet& S) {
  if (x.size() != partition.total_size()) {
    throw std::invalid_argument("vector does not match partition");
  }
  int len = 0;
  for (int i : S.indices) len += partition.group_size(i);
  Eigen::VectorXd out(len);
  int at = 0;
  for (int i : S.indices) {
    const int sz = partition.group_size(i);
    out.segment(at, sz) = x.segment(partition.offset(i), sz);
    at += sz;
  }
  return out;
}

GroupedVector embed_on_support(const Eigen::VectorXd& x_S, PartitionPtr partition,
                               const SupportSet& S) {
  GroupedVector out = GroupedVector::zeros(partition);
  int at = 0;
  for (int i : S.indices) {
    const int sz = partition->group_size(i);
    out.values.segment(partition->offset(i), sz) = x_S.segment(at, sz);
    at += sz;
  }
  if (at != x_S.size()) throw std::invalid_argument("restricted vector length mismatch");
  return out;
}

std::vector<int> support_group_sizes(const GroupPartition& partition, const SupportSet& S) {
  std::vector<int> out;
  out.reserve(S.indices.size());
  for (int i : S.indices) out.push_back(partition.group_size(i));
  return out;
}

}  // namespace gsopt
