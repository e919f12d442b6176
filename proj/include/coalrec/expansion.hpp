#pragma once

// Leading terms of the large-rho expansion
//   q(n) = q0(n) + q1(n) / rho + O(rho^-2).
//
// q0 is the product of one-locus marginal probabilities. q1 has a closed
// form built from an inclusion-exclusion sum over locus sets X, and is also
// the unique solution of a recursion over recombination events; both are
// provided so each can check the other.

#include <optional>
#include <vector>

#include "coalrec/haplotype.hpp"
#include "coalrec/model.hpp"

namespace coalrec {

struct ExpansionResult {
  double q0 = 0.0;
  double q1 = 0.0;
  std::optional<double> rho;
  /// q0 + q1 / rho, present iff rho is.
  std::optional<double> value;
};

/// prod_l p(n^(l)); 0 if any marginal entry is negative.
double q0(const MarginalVec& marginals, const ModelParams& params);
double q0(const SampleConfig& n, const ModelParams& params);

/// The per-locus factors p(n^(l)) whose product is q0.
std::vector<double> q0_factors(const SampleConfig& n, const ModelParams& params);

/// Closed form
///   q1 = sum_{h in H + {*}} q0(n - e_h)
///        sum_{X >= S(h), |X| >= 2} (-1)^{|X - S(h)|} / r_X * C(c(h, X), 2)
/// with c(h, X) = containment_count(n, h, X). Only h that are restrictions of
/// sample haplotypes can have c >= 2, so the outer sum runs over
/// contributing_subhaplotypes(n).
double q1_closed(const SampleConfig& n, const ModelParams& params);

/// Same as q1_closed but with h ranging over every element of H + {*}.
/// Exponential in L; used to check the pruning.
double q1_closed_full_domain(const SampleConfig& n, const ModelParams& params);

/// Two algebraically different right-hand sides for the q1 recursion.
enum class RecursionRhs {
  /// sum_h q0(n - e_h) sum_X (-1)^{|X - S(h)|} c(c - 1)
  InclusionExclusion,
  /// Pairwise coalescence terms minus the one-locus marginal terms, before
  /// the inclusion-exclusion rewrite.
  Coalescence,
};

double q1_recursion_rhs(const SampleConfig& n, const ModelParams& params,
                        RecursionRhs form = RecursionRhs::InclusionExclusion);

/// Solves
///   sum_h n_h sum_{l in B(h)} r_l [q1(n) - q1(n - e_h + e_{h[l-]} + e_{h[l+]})] = RHS(n)
/// by memoized descent over breaks. Singletons and configurations in which
/// no haplotype can break have q1 = 0.
double q1_recursive(const SampleConfig& n, const ModelParams& params,
                    RecursionRhs form = RecursionRhs::InclusionExclusion);

ExpansionResult expansion(const SampleConfig& n, const ModelParams& params);
ExpansionResult expansion(const SampleConfig& n, const ModelParams& params, double rho);

}  // namespace coalrec
