#include "coalrec/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "coalrec/errors.hpp"
#include "coalrec/io.hpp"
#include "coalrec/numeric.hpp"

namespace coalrec {

namespace {

// Index conventions of the explicit small-L formulas.
constexpr int kDot = -2;     // any specified allele
constexpr int kBullet = -3;  // specified or unspecified
constexpr int kStar = kUnspecified;

bool matches(Allele allele, int pattern) {
  switch (pattern) {
    case kDot:
      return allele != kUnspecified;
    case kBullet:
      return true;
    default:
      return allele == pattern;
  }
}

template <std::size_t L>
int pattern_count(const SampleConfig& n, const std::array<int, L>& pattern) {
  int total = 0;
  for (const auto& e : n.entries()) {
    bool ok = true;
    for (std::size_t l = 0; l < L && ok; ++l) ok = matches(e.haplotype[l], pattern[l]);
    if (ok) total += e.count;
  }
  return total;
}

double binom2(int m) { return static_cast<double>(choose2(m)); }

// q0(n - e_h) for the haplotype with the given (possibly * ) alleles.
double q0_minus(const MarginalVec& base, const ModelParams& params, std::vector<Allele> alleles) {
  MarginalVec m = base;
  m.add_haplotype(Haplotype(std::move(alleles)), -1);
  return q0(m, params);
}

void require_loci(const ModelParams& params, const SampleConfig& n, std::size_t expected,
                  const char* what) {
  if (params.num_loci() != expected) {
    throw ContractViolation(std::string(what) + " requires L = " + std::to_string(expected) +
                            ", model has L = " + std::to_string(params.num_loci()));
  }
  params.check_sample(n);
}

}  // namespace

double q1_three_locus(const SampleConfig& n, const ModelParams& params) {
  require_loci(params, n, 3, "q1_three_locus");
  using P3 = std::array<int, 3>;
  const double r1 = params.r()[0];
  const double r2 = params.r()[1];
  const double r12 = r1 + r2;
  const int k1 = params.alleles_per_locus()[0];
  const int k2 = params.alleles_per_locus()[1];
  const int k3 = params.alleles_per_locus()[2];
  const MarginalVec base = marginalize(n, params.alleles_per_locus());
  auto c = [&](int a, int b, int d) { return binom2(pattern_count(n, P3{a, b, d})); };

  CompensatedSum q1;
  q1 += q0(base, params) * (c(kDot, kDot, kBullet) / r1 + c(kBullet, kDot, kDot) / r2 +
                            c(kDot, kBullet, kDot) / r12 - c(kDot, kDot, kDot) / r12);
  for (int i = 0; i < k1; ++i) {
    q1 += q0_minus(base, params, {i, kStar, kStar}) *
          (c(i, kDot, kDot) / r12 - c(i, kBullet, kDot) / r12 - c(i, kDot, kBullet) / r1);
  }
  for (int j = 0; j < k2; ++j) {
    q1 += q0_minus(base, params, {kStar, j, kStar}) *
          (c(kDot, j, kDot) / r12 - c(kDot, j, kBullet) / r1 - c(kBullet, j, kDot) / r2);
  }
  for (int k = 0; k < k3; ++k) {
    q1 += q0_minus(base, params, {kStar, kStar, k}) *
          (c(kDot, kDot, k) / r12 - c(kDot, kBullet, k) / r12 - c(kBullet, kDot, k) / r2);
  }
  for (int i = 0; i < k1; ++i)
    for (int j = 0; j < k2; ++j)
      q1 += q0_minus(base, params, {i, j, kStar}) * (c(i, j, kBullet) / r1 - c(i, j, kDot) / r12);
  for (int j = 0; j < k2; ++j)
    for (int k = 0; k < k3; ++k)
      q1 += q0_minus(base, params, {kStar, j, k}) * (c(kBullet, j, k) / r2 - c(kDot, j, k) / r12);
  for (int i = 0; i < k1; ++i)
    for (int k = 0; k < k3; ++k)
      q1 += q0_minus(base, params, {i, kStar, k}) * (c(i, kBullet, k) / r12 - c(i, kDot, k) / r12);
  for (int i = 0; i < k1; ++i)
    for (int j = 0; j < k2; ++j)
      for (int k = 0; k < k3; ++k)
        q1 += q0_minus(base, params, {i, j, k}) * c(i, j, k) / r12;
  return q1.value();
}

double q1_two_locus(const SampleConfig& n, const ModelParams& params) {
  require_loci(params, n, 2, "q1_two_locus");
  using P2 = std::array<int, 2>;
  const int k1 = params.alleles_per_locus()[0];
  const int k2 = params.alleles_per_locus()[1];
  const MarginalVec base = marginalize(n, params.alleles_per_locus());
  auto c = [&](int a, int b) { return binom2(pattern_count(n, P2{a, b})); };

  CompensatedSum bracket;
  bracket += q0(base, params) * c(kDot, kDot);
  for (int i = 0; i < k1; ++i) bracket += -q0_minus(base, params, {i, kStar}) * c(i, kDot);
  for (int k = 0; k < k2; ++k) bracket += -q0_minus(base, params, {kStar, k}) * c(kDot, k);
  for (int i = 0; i < k1; ++i)
    for (int k = 0; k < k2; ++k) bracket += q0_minus(base, params, {i, k}) * c(i, k);
  return bracket.value() / params.r()[0];
}

double richardson_q1(const SampleConfig& n, const ModelParams& params,
                     std::span<const double> rhos, const ExactOptions& options) {
  if (rhos.size() < 2) throw ContractViolation("richardson_q1 needs at least two rho values");
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!(rhos[i] > 0.0)) throw ContractViolation("richardson_q1: rho values must be positive");
    if (i > 0 && !(rhos[i] > rhos[i - 1]))
      throw ContractViolation("richardson_q1: rho values must be strictly increasing");
  }
  const double base = q0(n, params);
  const StateSpace space = reachable_states(n, params, options);
  const std::size_t pos = space.position(n);

  // Neville's scheme on x = 1/rho, evaluated at x = 0.
  std::vector<double> x, f;
  for (double rho : rhos) {
    const double q = solve_all(space, params.with_rho(rho), options)[pos];
    x.push_back(1.0 / rho);
    f.push_back(rho * (q - base));
  }
  for (std::size_t level = 1; level < f.size(); ++level) {
    for (std::size_t i = f.size() - 1; i >= level; --i) {
      f[i] = (x[i - level] * f[i] - x[i] * f[i - 1]) / (x[i - level] - x[i]);
    }
  }
  return f.back();
}

std::vector<ComparisonRow> compare_sweep(const SampleConfig& n, const ModelParams& params,
                                         std::span<const double> rhos,
                                         const ExactOptions& options) {
  for (double rho : rhos)
    if (!(rho > 0.0)) throw ContractViolation("compare_sweep: rho values must be positive");
  const StateSpace space = reachable_states(n, params, options);
  const std::size_t pos = space.position(n);
  std::vector<ComparisonRow> rows;
  for (double rho : rhos) {
    ComparisonRow row;
    row.rho = rho;
    row.q_exact = solve_all(space, params.with_rho(rho), options)[pos];
    row.q_expansion = *expansion(n, params, rho).value;
    row.abs_err = std::abs(row.q_exact - row.q_expansion);
    row.scaled_err = row.abs_err * rho * rho;
    rows.push_back(row);
  }
  return rows;
}

LocusModel InstanceGenerator::random_locus(int num_alleles) {
  std::uniform_real_distribution<double> theta(0.1, 2.0);
  std::exponential_distribution<double> expo(1.0);
  const double t = theta(rng_);
  Eigen::MatrixXd P(num_alleles, num_alleles);
  for (int a = 0; a < num_alleles; ++a) {
    double total = 0.0;
    for (int b = 0; b < num_alleles; ++b) total += P(a, b) = expo(rng_);
    P.row(a) /= total;
    // Exact row sums; push any rounding into the largest entry.
    Eigen::Index big = 0;
    P.row(a).maxCoeff(&big);
    P(a, big) += 1.0 - P.row(a).sum();
  }
  return LocusModel::create(t, std::move(P));
}

LocusModel InstanceGenerator::random_pim_locus(int num_alleles) {
  std::uniform_real_distribution<double> theta(0.1, 2.0);
  std::exponential_distribution<double> expo(1.0);
  const double t = theta(rng_);
  std::vector<double> pi(static_cast<std::size_t>(num_alleles));
  double total = 0.0;
  for (double& p : pi) total += p = expo(rng_);
  for (double& p : pi) p /= total;
  return LocusModel::pim(t, std::move(pi));
}

ModelParams InstanceGenerator::random_params(std::size_t num_loci, int num_alleles) {
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  std::vector<LocusModel> loci;
  for (std::size_t l = 0; l < num_loci; ++l) loci.push_back(random_locus(num_alleles));
  std::vector<double> r;
  for (std::size_t l = 0; l + 1 < num_loci; ++l) r.push_back(scale(rng_));
  return ModelParams::create(std::move(loci), std::move(r));
}

SampleConfig InstanceGenerator::random_sample(const ModelParams& params, int max_size,
                                              double specified_prob) {
  std::uniform_int_distribution<int> size(1, max_size);
  std::bernoulli_distribution specified(specified_prob);
  const int total = size(rng_);
  SampleConfig n(params.num_loci());
  for (int i = 0; i < total; ++i) {
    std::vector<Allele> alleles;
    do {
      alleles.clear();
      for (std::size_t l = 0; l < params.num_loci(); ++l) {
        if (specified(rng_)) {
          std::uniform_int_distribution<int> allele(0, params.alleles_per_locus()[l] - 1);
          alleles.push_back(allele(rng_));
        } else {
          alleles.push_back(kUnspecified);
        }
      }
    } while (std::all_of(alleles.begin(), alleles.end(), [](Allele a) { return a == kUnspecified; }));
    n.add(Haplotype(std::move(alleles)), 1);
  }
  return n;
}

namespace {

Haplotype hap(std::initializer_list<int> one_based) {
  std::vector<Allele> alleles;
  for (int a : one_based) alleles.push_back(a == 0 ? kUnspecified : a - 1);
  return Haplotype(std::move(alleles));
}

Eigen::MatrixXd matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

NamedInstance reference_instance() {
  auto params = ModelParams::create({LocusModel::pim(1.0, {0.5, 0.5}), LocusModel::pim(1.0, {0.5, 0.5})},
                                    {1.0});
  return {"reference {(1,1):2}", params, SampleConfig(2, {{hap({1, 1}), 2}})};
}

std::vector<NamedInstance> standard_battery() {
  // 0 stands for an unspecified locus in hap().
  const auto pim2 = reference_instance().params;
  const auto general2 = ModelParams::create(
      {LocusModel::create(0.5, matrix({{0.9, 0.1}, {0.3, 0.7}})),
       LocusModel::create(1.5, matrix({{0.2, 0.8}, {0.6, 0.4}}))},
      {2.0});
  const auto tri_allelic = ModelParams::create(
      {LocusModel::create(0.8, matrix({{0.1, 0.6, 0.3}, {0.5, 0.2, 0.3}, {0.25, 0.25, 0.5}})),
       LocusModel::pim(1.2, {0.35, 0.65})},
      {0.7});
  const auto three = ModelParams::create(
      {LocusModel::pim(1.0, {0.3, 0.7}), LocusModel::create(0.7, matrix({{0.6, 0.4}, {0.5, 0.5}})),
       LocusModel::pim(1.3, {0.5, 0.5})},
      {1.0, 0.5});

  std::vector<NamedInstance> out;
  auto add = [&](const ModelParams& p, std::initializer_list<std::pair<Haplotype, int>> entries) {
    SampleConfig n(p.num_loci(), entries);
    out.push_back({n.to_string(), p, n});
  };
  add(pim2, {{hap({1, 1}), 2}});
  add(pim2, {{hap({1, 2}), 1}, {hap({2, 1}), 1}});
  add(pim2, {{hap({1, 1}), 1}, {hap({1, 0}), 1}, {hap({0, 1}), 1}});
  add(general2, {{hap({1, 2}), 1}});
  add(general2, {{hap({1, 1}), 1}, {hap({1, 2}), 1}});
  add(general2, {{hap({1, 1}), 2}, {hap({1, 0}), 1}});
  add(general2, {{hap({1, 1}), 1}, {hap({0, 1}), 1}});
  add(general2, {{hap({1, 0}), 1}, {hap({0, 2}), 1}});
  add(general2, {{hap({1, 0}), 2}, {hap({0, 1}), 1}});
  add(general2, {{hap({1, 1}), 3}});
  add(general2, {{hap({1, 2}), 2}, {hap({2, 1}), 1}});
  add(general2, {{hap({1, 1}), 1}, {hap({2, 2}), 1}, {hap({1, 0}), 1}});
  add(tri_allelic, {{hap({2, 1}), 2}, {hap({0, 1}), 1}});
  add(tri_allelic, {{hap({3, 2}), 1}, {hap({1, 2}), 1}});
  add(three, {{hap({1, 1, 1}), 2}});
  add(three, {{hap({1, 0, 2}), 2}});
  add(three, {{hap({1, 2, 1}), 1}, {hap({1, 1, 0}), 1}});
  add(three, {{hap({1, 1, 1}), 1}, {hap({0, 1, 1}), 1}});
  add(three, {{hap({1, 0, 1}), 1}, {hap({0, 2, 0}), 1}});
  add(three, {{hap({1, 1, 2}), 2}, {hap({2, 0, 0}), 1}});
  add(three, {{hap({1, 2, 1}), 1}, {hap({2, 1, 2}), 1}});
  add(three, {{hap({0, 1, 1}), 2}, {hap({1, 1, 0}), 1}});
  return out;
}

LocusModel permute_alleles(const LocusModel& model, std::span<const int> perm) {
  const int k = model.num_alleles();
  Eigen::MatrixXd P(k, k);
  std::vector<double> pi(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    pi[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])] = model.pi()[static_cast<std::size_t>(a)];
    for (int b = 0; b < k; ++b)
      P(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]) = model.transition()(a, b);
  }
  return LocusModel::create(model.theta(), std::move(P), std::move(pi));
}

SampleConfig permute_alleles(const SampleConfig& n, std::size_t locus, std::span<const int> perm) {
  SampleConfig out(n.num_loci());
  for (const auto& e : n.entries()) {
    std::vector<Allele> alleles(e.haplotype.alleles().begin(), e.haplotype.alleles().end());
    if (alleles[locus] != kUnspecified)
      alleles[locus] = perm[static_cast<std::size_t>(alleles[locus])];
    out.add(Haplotype(std::move(alleles)), e.count);
  }
  return out;
}

namespace {

std::string serialize(const ModelParams& params, const SampleConfig& n) {
  nlohmann::json doc = {{"model", model_to_json(params)}, {"sample", sample_to_json(n)["sample"]}};
  return doc.dump();
}

// Accumulates the worst deviation of one check and remembers the first
// instance that broke the tolerance.
class Check {
 public:
  Check(std::string name, double tolerance, bool tamper)
      : result_{std::move(name), true, 0, 0.0, tamper ? -1.0 : tolerance, std::nullopt} {}

  void record(double deviation, const ModelParams& params, const SampleConfig& n) {
    ++result_.instances;
    if (!std::isfinite(deviation)) deviation = HUGE_VAL;
    result_.worst = std::max(result_.worst, deviation);
    if (!(deviation <= result_.tolerance) && result_.passed) {
      result_.passed = false;
      result_.failing_instance = serialize(params, n);
    }
  }

  CheckResult result() const { return result_; }

 private:
  CheckResult result_;
};

double relative_or_absolute(double estimate, double reference, double abs_floor) {
  const double diff = std::abs(estimate - reference);
  if (std::abs(reference) <= abs_floor) return diff;
  return diff / std::abs(reference);
}

}  // namespace

std::vector<CheckResult> run_battery(const BatteryOptions& options) {
  const bool full = options.level == BatteryLevel::Full;
  InstanceGenerator gen(options.seed);
  std::vector<CheckResult> results;

  {
    Check check("one-locus: recursion solve vs Wright formula (n <= 6)", 1e-10, options.tamper);
    Check norm("one-locus: ordered normalization (n <= 5)", 1e-10, options.tamper);
    const int models = full ? 20 : 6;
    auto dummy = reference_instance();
    for (int i = 0; i < models; ++i) {
      const int k = 2 + i % 3;
      const LocusModel pim = gen.random_pim_locus(k);
      for (int m = 0; m <= 6; ++m)
        for (const auto& c : compositions(m, k))
          check.record(std::abs(one_locus_exact(c, pim) - wright_pim(c, pim)), dummy.params, dummy.sample);
      const LocusModel general = gen.random_locus(k);
      for (int m = 1; m <= 5; ++m) {
        long double total = 0.0L;
        for (const auto& c : compositions(m, k)) {
          double ways = std::tgamma(m + 1.0);
          for (int x : c) ways /= std::tgamma(x + 1.0);
          total += std::round(ways) * one_locus_exact(c, general);
        }
        norm.record(std::abs(static_cast<double>(total) - 1.0), dummy.params, dummy.sample);
      }
    }
    results.push_back(check.result());
    results.push_back(norm.result());
  }

  {
    Check exact("boundary: exact q(e_h) = prod pi", 1e-12, options.tamper);
    Check first("boundary: q1(e_h) = 0", 0.0, options.tamper);
    const int count = full ? 30 : 10;
    for (int i = 0; i < count; ++i) {
      const ModelParams params = gen.random_params(2 + static_cast<std::size_t>(i % 2), 2);
      const SampleConfig n = gen.random_sample(params, 1);
      double expected = 1.0;
      const Haplotype& h = n.entries().front().haplotype;
      for (std::size_t l : specified_loci(h)) expected *= params.locus(l).pi()[static_cast<std::size_t>(h[l])];
      exact.record(std::abs(solve_exact(n, params.with_rho(10.0)) - expected), params, n);
      first.record(std::max(std::abs(q1_closed(n, params)), std::abs(q1_recursive(n, params))), params, n);
    }
    results.push_back(exact.result());
    results.push_back(first.result());
  }

  {
    Check check("oracle: closed form vs recursion", 1e-9, options.tamper);
    Check rhs("oracle: recursion right-hand sides agree", 1e-9, options.tamper);
    const int count = full ? 1000 : 200;
    for (int i = 0; i < count; ++i) {
      const ModelParams params = gen.random_params(2 + static_cast<std::size_t>(i % 2), 2);
      const SampleConfig n = gen.random_sample(params, 4);
      const double closed = q1_closed(n, params);
      check.record(std::abs(closed - q1_recursive(n, params)), params, n);
      rhs.record(std::abs(q1_recursion_rhs(n, params, RecursionRhs::InclusionExclusion) -
                          q1_recursion_rhs(n, params, RecursionRhs::Coalescence)),
                 params, n);
    }
    results.push_back(check.result());
    results.push_back(rhs.result());
  }

  {
    Check three("specialization: explicit L=3 formula vs closed form", 1e-12, options.tamper);
    Check two("specialization: explicit L=2 formula vs closed form", 1e-12, options.tamper);
    Check pruned("closed form: pruned vs full haplotype domain", 1e-12, options.tamper);
    const int count = full ? 500 : 100;
    for (int i = 0; i < count; ++i) {
      const ModelParams p3 = gen.random_params(3, 2);
      const SampleConfig n3 = gen.random_sample(p3, 4);
      three.record(std::abs(q1_three_locus(n3, p3) - q1_closed(n3, p3)), p3, n3);
      const ModelParams p2 = gen.random_params(2, 2 + i % 2);
      const SampleConfig n2 = gen.random_sample(p2, 4);
      two.record(std::abs(q1_two_locus(n2, p2) - q1_closed(n2, p2)), p2, n2);
      pruned.record(std::abs(q1_closed_full_domain(n3, p3) - q1_closed(n3, p3)), p3, n3);
    }
    results.push_back(three.result());
    results.push_back(two.result());
    results.push_back(pruned.result());
  }

  {
    Check relabel("structure: allele relabeling invariance", 1e-12, options.tamper);
    Check marginal("structure: q0 depends only on marginals", 0.0, options.tamper);
    Check scaling("structure: q1(c r) = q1(r) / c", 1e-12, options.tamper);
    Check roundtrip("structure: break then coalesce is identity", 0.0, options.tamper);
    const int count = full ? 100 : 30;
    std::uniform_real_distribution<double> factor(0.1, 10.0);
    for (int i = 0; i < count; ++i) {
      const std::size_t num_loci = 2 + static_cast<std::size_t>(i % 2);
      const ModelParams params = gen.random_params(num_loci, 2);
      const SampleConfig n = gen.random_sample(params, 3);

      const std::size_t locus = static_cast<std::size_t>(i) % num_loci;
      const std::vector<int> swap{1, 0};
      std::vector<LocusModel> loci = params.loci();
      loci[locus] = permute_alleles(loci[locus], swap);
      const ModelParams permuted = ModelParams::create(loci, params.r());
      const SampleConfig pn = permute_alleles(n, locus, swap);
      const double q0_dev = std::abs(q0(n, params) - q0(pn, permuted));
      const double q1_dev = std::abs(q1_closed(n, params) - q1_closed(pn, permuted));
      double exact_dev = 0.0;
      if (i % 3 == 0) {
        exact_dev = std::abs(solve_exact(n, params.with_rho(5.0)) - solve_exact(pn, permuted.with_rho(5.0)));
      }
      relabel.record(std::max({q0_dev, q1_dev, exact_dev}), params, n);

      // Break every breakable haplotype once; marginals are unchanged.
      for (const auto& e : n.entries()) {
        for (std::size_t l : break_intervals(e.haplotype)) {
          auto [left, right] = break_hap(e.haplotype, l);
          SampleConfig m = n;
          m.add(e.haplotype, -1);
          m.add(left, 1);
          m.add(right, 1);
          marginal.record(std::abs(q0(n, params) - q0(m, params)), params, n);
          roundtrip.record(coalesce(left, right) == e.haplotype ? 0.0 : 1.0, params, n);
        }
      }

      const double c = factor(gen.rng());
      const double q1 = q1_closed(n, params);
      scaling.record(std::abs(q1_closed(n, params.scaled_r(c)) - q1 / c), params, n);
    }
    results.push_back(relabel.result());
    results.push_back(marginal.result());
    results.push_back(scaling.result());
    results.push_back(roundtrip.result());
  }

  {
    Check check("normalization: ordered sum of exact q (size <= 2, L = 2)", 1e-8, options.tamper);
    const int models = full ? 4 : 2;
    for (int i = 0; i < models; ++i) {
      const ModelParams params = gen.random_params(2, 2);
      for (double rho : {1.0, 100.0}) {
        for (int size = 1; size <= 2; ++size) {
          const double total = ordered_normalization(size, params.with_rho(rho));
          check.record(std::abs(total - 1.0), params, SampleConfig::singleton(Haplotype({0, 0})));
        }
      }
    }
    results.push_back(check.result());
  }

  {
    Check check("convergence: remainder ratio per decade in [0.005, 0.05]", 0.0, options.tamper);
    const NamedInstance ref = reference_instance();
    const std::array<double, 3> rhos{1e2, 1e3, 1e4};
    const auto rows = compare_sweep(ref.sample, ref.params, rhos);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double ratio = rows[i].abs_err / rows[i - 1].abs_err;
      // Distance outside the admissible band; zero when inside.
      const double outside = ratio < 0.005 ? 0.005 - ratio : (ratio > 0.05 ? ratio - 0.05 : 0.0);
      check.record(std::isfinite(ratio) ? outside : HUGE_VAL, ref.params, ref.sample);
    }
    results.push_back(check.result());
  }

  {
    // Relative 1e-4, or absolute 1e-8 when q1 vanishes.
    Check check("richardson: extrapolated q1 vs closed form", 1e-4, options.tamper);
    Check zero("richardson: extrapolated q1 where closed form is 0", 1e-8, options.tamper);
    const std::array<double, 2> rhos{1e4, 1e5};
    for (const auto& inst : standard_battery()) {
      const double closed = q1_closed(inst.sample, inst.params);
      const double est = richardson_q1(inst.sample, inst.params, rhos);
      if (closed == 0.0)
        zero.record(std::abs(est), inst.params, inst.sample);
      else
        check.record(relative_or_absolute(est, closed, 0.0), inst.params, inst.sample);
    }
    results.push_back(check.result());
    results.push_back(zero.result());
  }

  return results;
}

}  // namespace coalrec
