// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "coalrec/exact_solver.hpp"
#include "coalrec/expansion.hpp"
#include "coalrec/one_locus.hpp"
#include "coalrec/validation.hpp"

using namespace coalrec;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0 && secs > limit_s) {
    out.passed = false;
    out.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s budget)";
  }
  if (!out.passed) ++failures;
  std::printf("%s criterion %d: %s | %s | %.2f s\n", out.passed ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double multinomial(const std::vector<int>& counts) {
  int total = 0;
  for (int c : counts) total += c;
  double out = std::tgamma(total + 1.0);
  for (int c : counts) out /= std::tgamma(c + 1.0);
  return std::round(out);
}

}  // namespace

int main() {
  report(1, "closed-form q1 equals recursive q1 on random instances", 60.0, [] {
    InstanceGenerator gen(1001);
    double worst = 0.0;
    const int count = 300;
    for (int i = 0; i < count; ++i) {
      const ModelParams params = gen.random_params(2 + static_cast<std::size_t>(i % 2), 2);
      const SampleConfig n = gen.random_sample(params, 4);
      worst = std::max(worst, std::abs(q1_closed(n, params) - q1_recursive(n, params)));
    }
    return Outcome{worst <= 1e-9, fmt("%.0f instances, max diff %.3g <= 1e-9", count, worst)};
  });

  report(2, "exact remainder decays like rho^-2 on the reference config", 30.0, [] {
    const NamedInstance ref = reference_instance();
    const std::vector<double> rhos{1e2, 1e3, 1e4};
    const auto rows = compare_sweep(ref.sample, ref.params, rhos);
    const double r1 = rows[1].abs_err / rows[0].abs_err;
    const double r2 = rows[2].abs_err / rows[1].abs_err;
    auto in_band = [](double r) { return r >= 0.005 && r <= 0.05; };
    return Outcome{in_band(r1) && in_band(r2), fmt("decade ratios %.4g, %.4g in [0.005, 0.05]", r1, r2)};
  });

  report(3, "Richardson estimate of q1 from exact solves matches closed form", 0.0, [] {
    const std::vector<double> rhos{1e4, 1e5};
    const auto battery = standard_battery();
    double worst_rel = 0.0, worst_abs = 0.0;
    bool ok = battery.size() >= 20;
    for (const auto& inst : battery) {
      const double closed = q1_closed(inst.sample, inst.params);
      const double est = richardson_q1(inst.sample, inst.params, rhos);
      if (closed == 0.0) {
        worst_abs = std::max(worst_abs, std::abs(est));
        ok = ok && std::abs(est) <= 1e-8;
      } else {
        const double rel = std::abs(est - closed) / std::abs(closed);
        worst_rel = std::max(worst_rel, rel);
        ok = ok && rel <= 1e-4;
      }
    }
    return Outcome{ok, fmt("%.0f configs, worst rel %.3g <= 1e-4, worst abs (q1 = 0) %.3g <= 1e-8",
                           static_cast<double>(battery.size()), worst_rel, worst_abs)};
  });

  report(4, "explicit L=3 and L=2 formulas equal the general closed form", 0.0, [] {
    InstanceGenerator gen(2002);
    double worst3 = 0.0, worst2 = 0.0;
    for (int i = 0; i < 150; ++i) {
      const ModelParams p3 = gen.random_params(3, 2);
      const SampleConfig n3 = gen.random_sample(p3, 4);
      worst3 = std::max(worst3, std::abs(q1_three_locus(n3, p3) - q1_closed(n3, p3)));
      const ModelParams p2 = gen.random_params(2, 2 + i % 2);
      const SampleConfig n2 = gen.random_sample(p2, 4);
      worst2 = std::max(worst2, std::abs(q1_two_locus(n2, p2) - q1_closed(n2, p2)));
    }
    return Outcome{worst3 <= 1e-12 && worst2 <= 1e-12,
                   fmt("150 + 150 instances, L=3 max %.3g, L=2 max %.3g <= 1e-12", worst3, worst2)};
  });

  report(5, "boundary: exact q(e_h) = prod pi and q1(e_h) = 0", 0.0, [] {
    InstanceGenerator gen(3003);
    double worst = 0.0;
    bool zero = true;
    for (int i = 0; i < 40; ++i) {
      const ModelParams params = gen.random_params(2 + static_cast<std::size_t>(i % 2), 2 + i % 2);
      const SampleConfig n = gen.random_sample(params, 1);
      const Haplotype& h = n.entries().front().haplotype;
      double expected = 1.0;
      for (std::size_t l : specified_loci(h)) expected *= params.locus(l).pi()[static_cast<std::size_t>(h[l])];
      worst = std::max(worst, std::abs(solve_exact(n, params.with_rho(1.0 + i)) - expected));
      zero = zero && q1_closed(n, params) == 0.0 && q1_recursive(n, params) == 0.0;
    }
    return Outcome{worst <= 1e-12 && zero, fmt("40 singletons, max |q - prod pi| %.3g <= 1e-12, q1 exactly 0: ", worst) +
                                               (zero ? "yes" : "no")};
  });

  report(6, "one-locus recursion solve vs Wright formula, normalization", 0.0, [] {
    InstanceGenerator gen(4004);
    double worst_wright = 0.0, worst_norm = 0.0;
    for (int k = 2; k <= 3; ++k) {
      const LocusModel pim = gen.random_pim_locus(k);
      for (int m = 0; m <= 6; ++m)
        for (const auto& c : compositions(m, k))
          worst_wright = std::max(worst_wright, std::abs(one_locus_exact(c, pim) - wright_pim(c, pim)));
      for (const LocusModel& model : {gen.random_locus(k), pim}) {
        for (int m = 1; m <= 5; ++m) {
          long double total = 0.0L;
          for (const auto& c : compositions(m, k)) total += multinomial(c) * model.probability(c);
          worst_norm = std::max(worst_norm, std::abs(static_cast<double>(total) - 1.0));
        }
      }
    }
    return Outcome{worst_wright <= 1e-10 && worst_norm <= 1e-10,
                   fmt("max |exact - Wright| %.3g, max |sum - 1| %.3g, both <= 1e-10", worst_wright, worst_norm)};
  });

  report(7, "ordered exact probabilities sum to one (L=2, K=(2,2), size <= 2)", 0.0, [] {
    InstanceGenerator gen(5005);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const ModelParams params = gen.random_params(2, 2);
      for (double rho : {1.0, 100.0})
        for (int size = 1; size <= 2; ++size)
          worst = std::max(worst, std::abs(ordered_normalization(size, params.with_rho(rho)) - 1.0));
    }
    return Outcome{worst <= 1e-8, fmt("3 models x rho {1, 100}, max |sum - 1| %.3g <= 1e-8", worst)};
  });

  report(8, "structural invariants", 0.0, [] {
    InstanceGenerator gen(6006);
    std::uniform_real_distribution<double> factor(0.1, 10.0);
    double relabel = 0.0, marginal = 0.0, scaling = 0.0;
    bool roundtrip = true;
    for (int i = 0; i < 100; ++i) {
      const std::size_t num_loci = 2 + static_cast<std::size_t>(i % 2);
      const ModelParams params = gen.random_params(num_loci, 2);
      const SampleConfig n = gen.random_sample(params, 3);

      const std::size_t locus = static_cast<std::size_t>(i) % num_loci;
      const std::vector<int> swap{1, 0};
      std::vector<LocusModel> loci = params.loci();
      loci[locus] = permute_alleles(loci[locus], swap);
      const ModelParams permuted = ModelParams::create(loci, params.r());
      const SampleConfig pn = permute_alleles(n, locus, swap);
      relabel = std::max({relabel, std::abs(q0(n, params) - q0(pn, permuted)),
                          std::abs(q1_closed(n, params) - q1_closed(pn, permuted))});
      if (i % 4 == 0)
        relabel = std::max(relabel, std::abs(solve_exact(n, params.with_rho(3.0)) - solve_exact(pn, permuted.with_rho(3.0))));

      for (const auto& e : n.entries()) {
        for (std::size_t l : break_intervals(e.haplotype)) {
          auto [left, right] = break_hap(e.haplotype, l);
          SampleConfig m = n;
          m.add(e.haplotype, -1);
          m.add(left, 1);
          m.add(right, 1);
          marginal = std::max(marginal, std::abs(q0(n, params) - q0(m, params)));
          roundtrip = roundtrip && coalesce(left, right) == e.haplotype;
        }
      }

      const double c = factor(gen.rng());
      scaling = std::max(scaling, std::abs(q1_closed(n, params.scaled_r(c)) - q1_closed(n, params) / c));
    }
    const bool ok = relabel <= 1e-12 && marginal == 0.0 && scaling <= 1e-12 && roundtrip;
    return Outcome{ok, fmt("relabel %.3g <= 1e-12, marginal-only %.3g == 0, r-scaling %.3g <= 1e-12", relabel, marginal,
                           scaling) +
                           ", break/coalesce " + (roundtrip ? "exact" : "broken")};
  });

  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
