#pragma once

// Marginal one-locus sampling distributions p(n | theta, P) for
// finite-alleles mutation models.

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace coalrec {

namespace detail {
class OneLocusTable;
}

/// Mutation model at a single locus. Immutable once created; copies share
/// the memoized one-locus probability tables.
class LocusModel {
 public:
  /// Validates P (square, row-stochastic, irreducible) and theta > 0. When
  /// `pi` is supplied it is checked against P; otherwise it is computed.
  /// Throws ModelValidationError naming the offending row or allele.
  static LocusModel create(double theta, Eigen::MatrixXd transition,
                           std::optional<std::vector<double>> pi = std::nullopt);

  /// Parent-independent model with P_ab = pi_b.
  static LocusModel pim(double theta, std::vector<double> pi);

  int num_alleles() const { return static_cast<int>(pi_.size()); }
  double theta() const { return theta_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const std::vector<double>& pi() const { return pi_; }
  bool is_pim() const { return pim_; }

  /// p(counts): Wright's formula for PIM models, the level-by-level
  /// recursion solve otherwise. Counts must be non-negative.
  double probability(std::span<const int> counts) const;

 private:
  friend double one_locus_exact(std::span<const int> counts, const LocusModel& model);

  LocusModel() = default;

  double theta_ = 0.0;
  Eigen::MatrixXd transition_;
  std::vector<double> pi_;
  bool pim_ = false;
  std::shared_ptr<detail::OneLocusTable> table_;
};

/// Unique pi with pi P = pi, sum 1, pi > 0. Throws ModelValidationError for
/// non-stochastic or reducible P.
std::vector<double> stationary_distribution(const Eigen::MatrixXd& transition);

/// True iff every row of P equals the first within 1e-12.
bool is_pim(const Eigen::MatrixXd& transition);

/// Wright's formula prod_a (theta pi_a)_{n_a} / (theta)_n. Throws
/// ContractViolation for non-PIM models.
double wright_pim(std::span<const int> counts, const LocusModel& model);

/// Solves the one-locus recursion
///   [m(m-1) + theta m] p(m) = sum_a m_a(m_a-1) p(m-u_a)
///                             + theta sum_{a,b} P_ab m_b p(m-u_b+u_a)
/// with p(0) = 1 and p(u_a) = pi_a, one dense LU per total sample size.
/// Level tables are memoized inside the model and shared by its copies.
double one_locus_exact(std::span<const int> counts, const LocusModel& model);

/// Rising factorial x (x+1) ... (x+n-1).
double rising_factorial(double x, int n);

/// All vectors of `parts` non-negative integers summing to `total`, in
/// lexicographic order.
std::vector<std::vector<int>> compositions(int total, int parts);

}  // namespace coalrec
