#pragma once

// Reference formulas for two and three loci, numerical extraction of q1
// from exact solves, and the randomized cross-validation battery behind
// `coalrec validate`.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "coalrec/exact_solver.hpp"
#include "coalrec/expansion.hpp"
#include "coalrec/haplotype.hpp"
#include "coalrec/model.hpp"

namespace coalrec {

/// The explicit L = 3 expression for q1, written with the dot (sum over
/// specified alleles) and bullet (specified or unspecified) index
/// conventions. Shares no code with q1_closed beyond q0.
double q1_three_locus(const SampleConfig& n, const ModelParams& params);

/// The L = 2 expression
///   (1/r_1)[q0(n)C(n_cc,2) - sum_i q0(n - e_{i*})C(n_{i.},2)
///           - sum_k q0(n - e_{*k})C(n_{.k},2) + sum_{ik} q0(n - e_{ik})C(n_{ik},2)].
double q1_two_locus(const SampleConfig& n, const ModelParams& params);

/// Extrapolates rho * (q_exact(rho) - q0) to rho = infinity with a
/// polynomial in 1/rho through all given points. With two points this is a
/// single Richardson step removing the 1/rho correction. `rhos` must be
/// strictly increasing with at least two entries.
double richardson_q1(const SampleConfig& n, const ModelParams& params,
                     std::span<const double> rhos, const ExactOptions& options = {});

struct ComparisonRow {
  double rho = 0.0;
  double q_exact = 0.0;
  double q_expansion = 0.0;
  double abs_err = 0.0;
  /// abs_err * rho^2
  double scaled_err = 0.0;
};

/// One exact solve per rho (sharing one state space) against q0 + q1/rho.
std::vector<ComparisonRow> compare_sweep(const SampleConfig& n, const ModelParams& params,
                                         std::span<const double> rhos,
                                         const ExactOptions& options = {});

/// Seeded random models and samples. theta_l in [0.1, 2], r_l in [0.2, 5],
/// rows of P drawn from the flat Dirichlet.
class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

  LocusModel random_locus(int num_alleles);
  LocusModel random_pim_locus(int num_alleles);
  ModelParams random_params(std::size_t num_loci, int num_alleles);
  /// Total size uniform in [1, max_size]; each locus specified with
  /// probability `specified_prob`, never all unspecified.
  SampleConfig random_sample(const ModelParams& params, int max_size, double specified_prob = 0.6);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct NamedInstance {
  std::string name;
  ModelParams params;
  SampleConfig sample;
};

/// Fixed configurations (L = 2 and 3, specified/unspecified mixes) used for
/// the Richardson comparison and the rho sweeps.
std::vector<NamedInstance> standard_battery();

/// n = {(1,1):2}, L = 2, theta = 1, PIM uniform on K = 2, r_1 = 1.
NamedInstance reference_instance();

/// Relabels alleles at `locus` by `perm` (allele a becomes perm[a]) in the
/// model and returns the permuted model.
LocusModel permute_alleles(const LocusModel& model, std::span<const int> perm);
SampleConfig permute_alleles(const SampleConfig& n, std::size_t locus, std::span<const int> perm);

enum class BatteryLevel { Quick, Full };

struct BatteryOptions {
  std::uint64_t seed = 20240601;
  BatteryLevel level = BatteryLevel::Quick;
  /// Replaces every tolerance with a negative number so all checks fail;
  /// exercises the failure path.
  bool tamper = false;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  /// JSON document with the model and sample of the first failure.
  std::optional<std::string> failing_instance;
};

std::vector<CheckResult> run_battery(const BatteryOptions& options);

}  // namespace coalrec
