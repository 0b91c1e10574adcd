#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace gsopt {

// Group ell-infinity norms at or below this are treated as an exactly zero
// group everywhere a support set is computed.
inline constexpr double kDefaultZeroTol = 1e-10;

// Fidelity exponent r in [1, inf]. Infinity is a distinct state so that all
// dispatch on r is exact, never a comparison against a large float.
class RParam {
 public:
  RParam() = default;  // r = 2
  static RParam finite(double r);
  static RParam inf();

  bool is_inf() const { return inf_; }
  // Finite value; throws std::logic_error when is_inf().
  double value() const;

  bool operator==(const RParam& o) const = default;

  std::string str() const;                    // "2", "1.5", "inf"
  static RParam parse(const std::string&);    // accepts "inf" or a number

 private:
  double value_ = 2.0;
  bool inf_ = false;
};

// Contiguous partition of an N-vector into g groups.
class GroupPartition {
 public:
  explicit GroupPartition(std::vector<int> group_sizes);
  static GroupPartition uniform(int num_groups, int group_size);

  int num_groups() const { return static_cast<int>(sizes_.size()); }
  int total_size() const { return total_; }
  int group_size(int i) const { return sizes_.at(static_cast<size_t>(i)); }
  int offset(int i) const { return offsets_.at(static_cast<size_t>(i)); }
  const std::vector<int>& group_sizes() const { return sizes_; }

  bool operator==(const GroupPartition& o) const { return sizes_ == o.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

using PartitionPtr = std::shared_ptr<const GroupPartition>;

// Vector with a group structure attached. Values are mutable, the partition
// is shared and immutable.
struct GroupedVector {
  Eigen::VectorXd values;
  PartitionPtr partition;

  GroupedVector(Eigen::VectorXd v, PartitionPtr part);
  static GroupedVector zeros(PartitionPtr part);

  Eigen::VectorBlock<Eigen::VectorXd> group(int i) {
    return values.segment(partition->offset(i), partition->group_size(i));
  }
  Eigen::VectorBlock<const Eigen::VectorXd> group(int i) const {
    return values.segment(partition->offset(i), partition->group_size(i));
  }
};

// Ordered set of group indices (0-based, sorted, unique).
struct SupportSet {
  std::vector<int> indices;

  static SupportSet all(int num_groups);
  static SupportSet of(std::vector<int> idx, int num_groups);  // validates

  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
  bool contains(int i) const;
  bool subset_of(const SupportSet& other) const;
  bool operator==(const SupportSet& o) const = default;
};

// Problem instance: min over x of  sum_i ||x_i||_p^q + fidelity(A x - y).
struct ProblemSpec {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  double alpha = 1.0;  // fidelity weight, > 0
  double p = 2.0;      // group norm exponent, >= 1
  double q = 0.5;      // regularizer power, in (0, 1)
  RParam r;            // fidelity exponent
  PartitionPtr partition;

  void validate() const;  // throws std::invalid_argument on any violation
};

// ||x_i||_p. p may be +infinity (max absolute entry).
double group_norm(const GroupedVector& x, int i, double p);
double vector_norm_p(const Eigen::VectorXd& v, double p);

// Groups whose ell-infinity norm exceeds zero_tol.
SupportSet group_support(const GroupedVector& x, double zero_tol);

// (1/(r*alpha)) ||Ax - y||_r^r for finite r, (1/alpha) ||Ax - y||_inf for r = inf.
double fidelity(const ProblemSpec& problem, const GroupedVector& x);
double fidelity_of_residual(const Eigen::VectorXd& residual, double alpha, const RParam& r);

// sum_i ||x_i||_p^q + fidelity.
double objective(const ProblemSpec& problem, const GroupedVector& x);

// Column sub-matrix of A keeping the blocks of the given groups, in order.
Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& A, const GroupPartition& partition,
                                 const SupportSet& S);

// Stacks the entries of x belonging to groups in S (in order).
Eigen::VectorXd restrict_values(const Eigen::VectorXd& x, const GroupPartition& partition,
                                const SupportSet& S);

// Inverse of restrict_values: zeros everywhere outside S.
GroupedVector embed_on_support(const Eigen::VectorXd& x_S, PartitionPtr partition,
                               const SupportSet& S);

// Group sizes of the restricted vector, in S order.
std::vector<int> support_group_sizes(const GroupPartition& partition, const SupportSet& S);

}  // namespace gsopt
