#pragma once

// Exact sampling probabilities at finite rho: enumerate every configuration
// reachable from the sample under coalescence, mutation and recombination,
// assemble the coalescent-with-recombination recursion as a sparse system
// and factorize it.

#include <Eigen/SparseCore>
#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "coalrec/haplotype.hpp"
#include "coalrec/model.hpp"

namespace coalrec {

struct ExactOptions {
  std::size_t state_cap = 200'000;
  /// Long-double residual refinement passes after the sparse LU solve.
  int refinement_steps = 2;
};

/// Configurations closed under the recursion's transitions, in BFS order
/// with each state's newly discovered neighbours sorted.
class StateSpace {
 public:
  std::span<const SampleConfig> states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  /// Position of `n`, or size() if it is not in the space.
  std::size_t position(const SampleConfig& n) const;

 private:
  friend StateSpace reachable_states(std::span<const SampleConfig> roots,
                                     const ModelParams& params, const ExactOptions& options);
  std::vector<SampleConfig> states_;
  std::unordered_map<SampleConfig, std::size_t, SampleConfigHash> index_;
};

/// Rows are scaled so every diagonal entry is 1. The coefficients are
/// assembled in long double; `matrix` and `rhs` are their rounded copies used
/// for factorization, while residuals are taken against the extended ones.
/// At large rho the rows are dominated by recombination terms, and rounding
/// them to double alone perturbs q by about eps * rho.
struct LinearSystem {
  Eigen::SparseMatrix<long double> matrix_ext;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> rhs_ext;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

StateSpace reachable_states(const SampleConfig& n, const ModelParams& params,
                            const ExactOptions& options = {});
/// Union of the closures of several roots.
StateSpace reachable_states(std::span<const SampleConfig> roots, const ModelParams& params,
                            const ExactOptions& options = {});

/// One row per state. Singletons are pinned to their boundary value
/// prod_{l in S(h)} pi_{h_l}; other rows encode the recursion with
/// rho_l = r_l rho and identity mutations folded into the diagonal.
/// Requires params.rho().
LinearSystem build_system(const StateSpace& space, const ModelParams& params);

/// Unscaled diagonal coefficient of the recursion row for `n`:
/// sum_h n_h [(n-1) + sum_{S(h)} theta_l + sum_{B(h)} rho_l] minus the
/// identity-mutation mass.
long double recursion_diagonal(const SampleConfig& n, const ModelParams& params);

struct ExactResult {
  double q = 0.0;
  std::size_t num_states = 0;
};

ExactResult solve_exact_detailed(const SampleConfig& n, const ModelParams& params,
                                 const ExactOptions& options = {});

/// q(n) at params.rho(). Throws SolverError on a singular factorization and
/// ResourceLimitError when the state space exceeds the cap.
double solve_exact(const SampleConfig& n, const ModelParams& params,
                   const ExactOptions& options = {});

/// Solves every state of `space` at once; result[i] is q(space.states()[i]).
std::vector<double> solve_all(const StateSpace& space, const ModelParams& params,
                              const ExactOptions& options = {});

/// Sum over all unordered configurations of `size` fully specified
/// haplotypes of (number of orderings) * q(config). Equals 1 for a
/// correct solver. `config_cap` bounds how many configurations are summed.
double ordered_normalization(int size, const ModelParams& params,
                             const ExactOptions& options = {}, std::size_t config_cap = 5'000);

/// Every haplotype specified at all loci, in haplotype order.
std::vector<Haplotype> fully_specified_haplotypes(std::span<const int> alleles_per_locus);

}  // namespace coalrec
