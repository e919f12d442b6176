#include <cmath>
#include <functional>

#include "coalrec/expansion.hpp"
#include "coalrec/one_locus.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace coalrec;
using coalrec::test::hap;
using coalrec::test::sample;
using coalrec::test::two_state;
using coalrec::test::uniform_params;

namespace {

// Wright's formula written out directly for PIM loci.
double wright(const std::vector<int>& counts, double theta, const std::vector<double>& pi) {
  int total = 0;
  double num = 1.0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    for (int i = 0; i < counts[a]; ++i) num *= theta * pi[a] + i;
    total += counts[a];
  }
  double den = 1.0;
  for (int i = 0; i < total; ++i) den *= theta + i;
  return num / den;
}

// Every haplotype over K alleles per locus, the all-unspecified one included.
std::vector<Haplotype> all_haplotypes(std::size_t num_loci, int k) {
  std::vector<Haplotype> out;
  std::vector<Allele> cur(num_loci);
  std::function<void(std::size_t)> rec = [&](std::size_t l) {
    if (l == num_loci) {
      out.emplace_back(cur);
      return;
    }
    for (Allele a = kUnspecified; a < k; ++a) {
      cur[l] = a;
      rec(l + 1);
    }
  };
  rec(0);
  return out;
}

// The closed form summed over the whole haplotype domain, PIM loci only.
double brute_q1(const SampleConfig& n, const ModelParams& params) {
  const std::size_t L = params.num_loci();
  const int k = params.alleles_per_locus()[0];
  double total = 0.0;
  for (const Haplotype& h : all_haplotypes(L, k)) {
    double q0h = 1.0;
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (const auto& e : n.entries())
        if (e.haplotype.is_specified(l)) counts[static_cast<std::size_t>(e.haplotype[l])] += e.count;
      if (h.is_specified(l)) --counts[static_cast<std::size_t>(h[l])];
      bool negative = false;
      for (int c : counts) negative = negative || c < 0;
      q0h = negative ? 0.0 : q0h * wright(counts, params.locus(l).theta(), params.locus(l).pi());
    }
    if (q0h == 0.0) continue;

    for (LocusSet X = 0; X < (LocusSet{1} << L); ++X) {
      if (__builtin_popcount(X) < 2) continue;
      bool covers = true;
      for (std::size_t l = 0; l < L; ++l)
        if (h.is_specified(l) && !(X >> l & 1)) covers = false;
      if (!covers) continue;
      int c = 0;
      for (const auto& e : n.entries()) {
        bool ok = true;
        for (std::size_t l = 0; l < L; ++l) {
          if ((X >> l & 1) && !e.haplotype.is_specified(l)) ok = false;
          if (h.is_specified(l) && e.haplotype[l] != h[l]) ok = false;
        }
        if (ok) c += e.count;
      }
      int lo = 0, hi = 0;
      for (std::size_t l = 0; l < L; ++l)
        if (X >> l & 1) hi = static_cast<int>(l);
      for (int l = static_cast<int>(L) - 1; l >= 0; --l)
        if (X >> l & 1) lo = l;
      double rx = 0.0;
      for (int l = lo; l < hi; ++l) rx += params.r()[static_cast<std::size_t>(l)];
      int extra = __builtin_popcount(X);
      for (std::size_t l = 0; l < L; ++l) extra -= h.is_specified(l) ? 1 : 0;
      total += q0h * (extra % 2 ? -1.0 : 1.0) / rx * (c * (c - 1) / 2.0);
    }
  }
  return total;
}

// All multisets of size 1..max_size over the non-sentinel haplotypes.
std::vector<SampleConfig> all_samples(std::size_t num_loci, int k, int max_size) {
  std::vector<Haplotype> haps;
  for (const auto& h : all_haplotypes(num_loci, k))
    if (!h.is_sentinel()) haps.push_back(h);
  std::vector<SampleConfig> out;
  std::function<void(std::size_t, SampleConfig&, int)> rec = [&](std::size_t from, SampleConfig& cur,
                                                                 int left) {
    if (!cur.empty()) out.push_back(cur);
    if (left == 0) return;
    for (std::size_t i = from; i < haps.size(); ++i) {
      cur.add(haps[i]);
      rec(i, cur, left - 1);
      cur.add(haps[i], -1);
    }
  };
  SampleConfig cur(num_loci);
  rec(0, cur, max_size);
  return out;
}

ModelParams skewed_pim(std::size_t num_loci) {
  std::vector<LocusModel> loci;
  for (std::size_t l = 0; l < num_loci; ++l)
    loci.push_back(LocusModel::pim(0.6 + 0.5 * static_cast<double>(l), {0.3 + 0.1 * static_cast<double>(l), 0.7 - 0.1 * static_cast<double>(l)}));
  std::vector<double> r;
  for (std::size_t l = 0; l + 1 < num_loci; ++l) r.push_back(0.8 + 1.1 * static_cast<double>(l));
  return ModelParams::create(std::move(loci), std::move(r));
}

}  // namespace

TEST_CASE("q0") {
  const ModelParams params = uniform_params({1.0});
  CHECK(q0(sample({{"1,2", 1}}), params) == 0.25);
  CHECK(q0(sample({{"1,1", 2}}), params) == 0.140625);

  const auto factors = q0_factors(sample({{"1,1", 2}, {"2,*", 1}}), params);
  CHECK(factors[0] == doctest::Approx(wright({2, 1}, 1.0, {0.5, 0.5})));
  CHECK(factors[1] == doctest::Approx(wright({2, 0}, 1.0, {0.5, 0.5})));

  MarginalVec m = marginalize(sample({{"1,*", 1}}), params.alleles_per_locus());
  m.add_haplotype(hap("1,1"), -1);
  CHECK(q0(m, params) == 0.0);

  SUBCASE("depends only on marginals") {
    CHECK(q0(sample({{"1,2", 1}, {"2,1", 1}}), params) == q0(sample({{"1,*", 1}, {"2,*", 1}, {"*,2", 1}, {"*,1", 1}}), params));
  }
}

TEST_CASE("q1 reference values") {
  const ModelParams params = uniform_params({1.0});
  const SampleConfig n = sample({{"1,1", 2}});
  // (1/r_1)[0.140625 - 0.1875 - 0.1875 + 0.25]
  const double hand = 0.140625 - 0.1875 - 0.1875 + 0.25;
  CHECK(hand == 0.015625);
  CHECK(std::abs(q1_closed(n, params) - hand) < 1e-15);
  CHECK(std::abs(q1_recursive(n, params) - hand) < 1e-15);

  CHECK(q1_closed(sample({{"1,2", 1}}), params) == 0.0);
  CHECK(q1_recursive(sample({{"1,2", 1}}), params) == 0.0);
  CHECK(q1_recursive(sample({{"1,*", 1}, {"*,1", 1}}), params) == 0.0);
  CHECK(q1_closed(sample({{"1,*", 2}, {"*,1", 1}, {"*,2", 3}}), params) == 0.0);
}

TEST_CASE("closed form against brute force over the full haplotype domain") {
  for (const ModelParams& params : {uniform_params({1.0}), skewed_pim(2)}) {
    for (const SampleConfig& n : all_samples(2, 2, 3)) {
      const double brute = brute_q1(n, params);
      CHECK(std::abs(q1_closed(n, params) - brute) < 1e-13);
      CHECK(std::abs(q1_closed_full_domain(n, params) - brute) < 1e-13);
    }
  }
  const ModelParams three = skewed_pim(3);
  for (const SampleConfig& n : all_samples(3, 2, 2)) CHECK(std::abs(q1_closed(n, three) - brute_q1(n, three)) < 1e-13);
}

TEST_CASE("closed form solves the recursion") {
  const ModelParams general =
      ModelParams::create({two_state(0.4, 0.3, 0.6), two_state(1.2, 0.9, 0.2), two_state(0.9, 0.5, 0.5)}, {0.7, 2.5});
  for (const SampleConfig& n : {sample({{"1,1,1", 2}}), sample({{"1,*,2", 1}, {"2,1,*", 2}}),
                                sample({{"1,2,1", 1}, {"*,2,2", 1}, {"1,*,*", 1}})}) {
    CHECK(std::abs(q1_closed(n, general) - q1_recursive(n, general)) < 1e-12);
    CHECK(std::abs(q1_recursion_rhs(n, general, RecursionRhs::InclusionExclusion) -
                   q1_recursion_rhs(n, general, RecursionRhs::Coalescence)) < 1e-12);
  }
}

TEST_CASE("scaling of r") {
  const ModelParams params = skewed_pim(3);
  const SampleConfig n = sample({{"1,2,1", 2}, {"2,*,1", 1}});
  for (double c : {0.25, 3.0, 40.0})
    CHECK(std::abs(q1_closed(n, params.scaled_r(c)) - q1_closed(n, params) / c) < 1e-14);
}

TEST_CASE("expansion values") {
  const ModelParams params = uniform_params({1.0});
  const ExpansionResult e = expansion(sample({{"1,1", 2}}), params, 100.0);
  CHECK(e.value.has_value());
  CHECK(*e.value == doctest::Approx(0.14078125).epsilon(1e-15));

  const ExpansionResult s = expansion(sample({{"2,1", 1}}), params, 3.0);
  CHECK(*s.value == 0.25);

  const ExpansionResult limit = expansion(sample({{"1,1", 2}}), params);
  CHECK_FALSE(limit.value.has_value());
  CHECK(limit.q0 == 0.140625);
  CHECK(std::abs(*expansion(sample({{"1,1", 2}}), params, 1e300).value - limit.q0) < 1e-15);
}
