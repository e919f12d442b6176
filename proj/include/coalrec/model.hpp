#pragma once

#include <optional>
#include <vector>

#include "coalrec/haplotype.hpp"
#include "coalrec/one_locus.hpp"

namespace coalrec {

/// The L-locus model: per-locus mutation models, the recombination scale
/// constants r_1..r_{L-1} (rho_l = r_l * rho), and optionally rho itself.
class ModelParams {
 public:
  /// Throws ModelValidationError unless L >= 2, r has L-1 positive entries
  /// and rho (when given) is positive.
  static ModelParams create(std::vector<LocusModel> loci, std::vector<double> r,
                            std::optional<double> rho = std::nullopt);

  std::size_t num_loci() const { return loci_.size(); }
  const std::vector<LocusModel>& loci() const { return loci_; }
  const LocusModel& locus(std::size_t l) const { return loci_[l]; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<int>& alleles_per_locus() const { return alleles_; }
  std::optional<double> rho() const { return rho_; }

  ModelParams with_rho(double rho) const;
  ModelParams without_rho() const;
  /// Same model with every r_l multiplied by `factor`.
  ModelParams scaled_r(double factor) const;

  /// Throws ModelValidationError if `n` is empty, has the wrong number of
  /// loci, or carries an allele outside [K_l].
  void check_sample(const SampleConfig& n) const;

 private:
  ModelParams() = default;

  std::vector<LocusModel> loci_;
  std::vector<double> r_;
  std::vector<int> alleles_;
  std::optional<double> rho_;
};

}  // namespace coalrec
