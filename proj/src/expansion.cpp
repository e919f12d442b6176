#include "coalrec/expansion.hpp"

#include <cmath>
#include <unordered_map>

#include "coalrec/errors.hpp"
#include "coalrec/numeric.hpp"

namespace coalrec {

namespace {

// Inner sum over X of (-1)^{|X - S(h)|} * weight(c(h, X)) * scale(X), in
// ascending bitmask order of X.
template <typename Weight, typename Scale>
double inclusion_exclusion(const SampleConfig& n, const Haplotype& h, std::size_t num_loci,
                           Weight&& weight, Scale&& scale) {
  const LocusSet base = h.specified_mask();
  const LocusSet full = full_set(num_loci);
  CompensatedSum inner;
  for (LocusSet x = 0; x <= full; ++x) {
    if (!is_subset(base, x) || set_size(x) < 2) continue;
    const std::int64_t c = containment_count(n, h, x);
    const std::int64_t w = weight(c);
    if (w == 0) continue;
    const double sign = set_size(x & ~base) % 2 == 0 ? 1.0 : -1.0;
    inner += sign * static_cast<double>(w) * scale(x);
  }
  return inner.value();
}

double q0_without(const MarginalVec& base, const Haplotype& h, const ModelParams& params) {
  MarginalVec m = base;
  m.add_haplotype(h, -1);
  return q0(m, params);
}

// Sum over the given h of q0(n - e_h) * inclusion-exclusion(h).
template <typename Range, typename Weight, typename Scale>
double outer_sum(const SampleConfig& n, const ModelParams& params, const Range& haplotypes,
                 Weight&& weight, Scale&& scale) {
  const MarginalVec base = marginalize(n, params.alleles_per_locus());
  CompensatedSum total;
  for (const Haplotype& h : haplotypes) {
    const double inner = inclusion_exclusion(n, h, params.num_loci(), weight, scale);
    if (inner == 0.0) continue;
    total += q0_without(base, h, params) * inner;
  }
  return total.value();
}

std::vector<Haplotype> all_haplotypes_with_sentinel(const ModelParams& params) {
  std::vector<Haplotype> out;
  std::vector<Allele> cur(params.num_loci(), kUnspecified);
  const auto& k = params.alleles_per_locus();
  while (true) {
    out.emplace_back(cur);
    std::size_t l = cur.size();
    bool done = true;
    while (l > 0) {
      --l;
      // kUnspecified -> 0 -> ... -> K_l - 1 -> wrap to kUnspecified
      if (++cur[l] < k[l]) {
        done = false;
        break;
      }
      cur[l] = kUnspecified;
    }
    if (done) return out;
  }
}

void check_inputs(const SampleConfig& n, const ModelParams& params) { params.check_sample(n); }

}  // namespace

double q0(const MarginalVec& marginals, const ModelParams& params) {
  if (marginals.num_loci() != params.num_loci()) {
    throw ContractViolation("q0: marginal vector has the wrong number of loci");
  }
  if (marginals.has_negative()) return 0.0;
  double q = 1.0;
  for (std::size_t l = 0; l < params.num_loci(); ++l) q *= params.locus(l).probability(marginals.locus(l));
  return q;
}

double q0(const SampleConfig& n, const ModelParams& params) {
  check_inputs(n, params);
  return q0(marginalize(n, params.alleles_per_locus()), params);
}

std::vector<double> q0_factors(const SampleConfig& n, const ModelParams& params) {
  check_inputs(n, params);
  const MarginalVec m = marginalize(n, params.alleles_per_locus());
  std::vector<double> out;
  for (std::size_t l = 0; l < params.num_loci(); ++l) out.push_back(params.locus(l).probability(m.locus(l)));
  return out;
}

double q1_closed(const SampleConfig& n, const ModelParams& params) {
  check_inputs(n, params);
  const auto& r = params.r();
  return outer_sum(
      n, params, contributing_subhaplotypes(n), [](std::int64_t c) { return choose2(c); },
      [&](LocusSet x) { return 1.0 / r_sum(x, r); });
}

double q1_closed_full_domain(const SampleConfig& n, const ModelParams& params) {
  check_inputs(n, params);
  const auto& r = params.r();
  return outer_sum(
      n, params, all_haplotypes_with_sentinel(params), [](std::int64_t c) { return choose2(c); },
      [&](LocusSet x) { return 1.0 / r_sum(x, r); });
}

double q1_recursion_rhs(const SampleConfig& n, const ModelParams& params, RecursionRhs form) {
  if (form == RecursionRhs::InclusionExclusion) {
    return outer_sum(
        n, params, contributing_subhaplotypes(n), [](std::int64_t c) { return c * (c - 1); },
        [](LocusSet) { return 1.0; });
  }

  const MarginalVec base = marginalize(n, params.alleles_per_locus());
  const auto entries = n.entries();
  CompensatedSum total;

  // Ordered pairs of distinct compatible haplotypes, then identical pairs.
  for (const auto& e : entries) {
    for (const auto& f : entries) {
      if (e.haplotype == f.haplotype || !is_compatible(e.haplotype, f.haplotype)) continue;
      MarginalVec m = base;
      m.add_haplotype(e.haplotype, -1);
      m.add_haplotype(f.haplotype, -1);
      m.add_haplotype(coalesce(e.haplotype, f.haplotype), 1);
      total += static_cast<double>(e.count) * f.count * q0(m, params);
    }
    if (e.count >= 2)
      total += static_cast<double>(e.count) * (e.count - 1) * q0_without(base, e.haplotype, params);
  }

  const double q0_n = q0(base, params);
  const double size = n.total();
  double marginal_pairs = 0.0;
  for (std::size_t l = 0; l < params.num_loci(); ++l) {
    double nl = 0.0;
    for (int c : base.locus(l)) nl += c;
    marginal_pairs += nl * (nl - 1.0);
    for (Allele a = 0; a < params.locus(l).num_alleles(); ++a) {
      const int c = base.at(l, a);
      if (c < 2) continue;
      MarginalVec m = base;
      m.add_allele(l, a, -1);
      total += -static_cast<double>(c) * (c - 1) * q0(m, params);
    }
  }
  total += -(size * (size - 1.0) - marginal_pairs) * q0_n;
  return total.value();
}

namespace {

class Q1Recursion {
 public:
  Q1Recursion(const ModelParams& params, RecursionRhs form) : params_(params), form_(form) {}

  double solve(const SampleConfig& n) {
    if (n.is_singleton()) return 0.0;
    double rate = 0.0;
    for (const auto& e : n.entries())
      for (std::size_t l : break_intervals(e.haplotype)) rate += e.count * params_.r()[l];
    // No haplotype can break: the recursion's left side vanishes and the
    // closed form evaluates to zero.
    if (rate == 0.0) return 0.0;
    if (auto it = memo_.find(n); it != memo_.end()) return it->second;

    CompensatedSum acc;
    acc += q1_recursion_rhs(n, params_, form_);
    for (const auto& e : n.entries()) {
      for (std::size_t l : break_intervals(e.haplotype)) {
        auto [left, right] = break_hap(e.haplotype, l);
        SampleConfig m = n;
        m.add(e.haplotype, -1);
        m.add(left, 1);
        m.add(right, 1);
        acc += e.count * params_.r()[l] * solve(m);
      }
    }
    const double value = acc.value() / rate;
    memo_.emplace(n, value);
    return value;
  }

 private:
  const ModelParams& params_;
  RecursionRhs form_;
  std::unordered_map<SampleConfig, double, SampleConfigHash> memo_;
};

}  // namespace

double q1_recursive(const SampleConfig& n, const ModelParams& params, RecursionRhs form) {
  check_inputs(n, params);
  Q1Recursion recursion(params, form);
  return recursion.solve(n);
}

ExpansionResult expansion(const SampleConfig& n, const ModelParams& params) {
  if (params.rho()) return expansion(n, params, *params.rho());
  ExpansionResult out;
  out.q0 = q0(n, params);
  out.q1 = q1_closed(n, params);
  return out;
}

ExpansionResult expansion(const SampleConfig& n, const ModelParams& params, double rho) {
  if (!(rho > 0.0)) throw ContractViolation("expansion: rho must be positive");
  ExpansionResult out;
  out.q0 = q0(n, params);
  out.q1 = q1_closed(n, params);
  out.rho = rho;
  out.value = out.q0 + out.q1 / rho;
  return out;
}

}  // namespace coalrec
