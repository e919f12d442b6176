#include "coalrec/haplotype.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "coalrec/errors.hpp"

namespace coalrec {

namespace {

// Unspecified sorts after every real allele.
std::int64_t order_key(Allele a) {
  return a == kUnspecified ? std::int64_t{1} << 40 : std::int64_t{a};
}

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

}  // namespace

Haplotype::Haplotype(std::vector<Allele> alleles) : alleles_(std::move(alleles)) {
  if (alleles_.size() > kMaxLoci) {
    throw ContractViolation("haplotype has " + std::to_string(alleles_.size()) +
                            " loci; at most " + std::to_string(kMaxLoci) + " supported");
  }
  for (std::size_t l = 0; l < alleles_.size(); ++l) {
    if (alleles_[l] < kUnspecified) {
      throw ContractViolation("negative allele index at locus " + std::to_string(l + 1));
    }
    if (alleles_[l] != kUnspecified) mask_ |= LocusSet{1} << l;
  }
}

Haplotype Haplotype::unspecified(std::size_t num_loci) {
  return Haplotype(std::vector<Allele>(num_loci, kUnspecified));
}

std::string Haplotype::to_string() const {
  std::string out = "(";
  for (std::size_t l = 0; l < alleles_.size(); ++l) {
    if (l) out += ',';
    out += alleles_[l] == kUnspecified ? std::string("*") : std::to_string(alleles_[l] + 1);
  }
  return out + ")";
}

std::strong_ordering operator<=>(const Haplotype& a, const Haplotype& b) {
  const std::size_t n = std::min(a.alleles_.size(), b.alleles_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = order_key(a.alleles_[i]) <=> order_key(b.alleles_[i]); c != 0) return c;
  }
  return a.alleles_.size() <=> b.alleles_.size();
}

std::size_t HaplotypeHash::operator()(const Haplotype& h) const noexcept {
  std::size_t seed = h.num_loci();
  for (Allele a : h.alleles()) hash_combine(seed, static_cast<std::size_t>(a + 1));
  return seed;
}

std::vector<std::size_t> specified_loci(const Haplotype& h) {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < h.num_loci(); ++l)
    if (h.is_specified(l)) out.push_back(l);
  return out;
}

std::vector<std::size_t> break_intervals(const Haplotype& h) {
  std::vector<std::size_t> out;
  const LocusSet m = h.specified_mask();
  if (m == 0) return out;
  const auto lo = static_cast<std::size_t>(std::countr_zero(m));
  const auto hi = static_cast<std::size_t>(31 - std::countl_zero(m));
  for (std::size_t l = lo; l < hi; ++l) out.push_back(l);
  return out;
}

std::size_t span_length(const Haplotype& h) {
  const LocusSet m = h.specified_mask();
  if (m == 0) return 0;
  return static_cast<std::size_t>((31 - std::countl_zero(m)) - std::countr_zero(m));
}

bool is_compatible(const Haplotype& h, const Haplotype& g) {
  const LocusSet both = h.specified_mask() & g.specified_mask();
  for (std::size_t l = 0; l < h.num_loci(); ++l)
    if ((both >> l & 1U) && h[l] != g[l]) return false;
  return true;
}

bool contains(const Haplotype& h, const Haplotype& g) {
  if (!is_subset(g.specified_mask(), h.specified_mask())) return false;
  for (std::size_t l = 0; l < g.num_loci(); ++l)
    if (g.is_specified(l) && h[l] != g[l]) return false;
  return true;
}

Haplotype coalesce(const Haplotype& h, const Haplotype& g) {
  if (h.num_loci() != g.num_loci() || !is_compatible(h, g)) {
    throw ContractViolation("coalesce: " + h.to_string() + " and " + g.to_string() +
                            " are not compatible");
  }
  std::vector<Allele> out(h.alleles().begin(), h.alleles().end());
  for (std::size_t l = 0; l < out.size(); ++l)
    if (out[l] == kUnspecified) out[l] = g[l];
  return Haplotype(std::move(out));
}

Haplotype mutate(const Haplotype& h, std::size_t locus, Allele a) {
  if (locus >= h.num_loci() || !h.is_specified(locus)) {
    throw ContractViolation("mutate: locus " + std::to_string(locus + 1) +
                            " is not specified in " + h.to_string());
  }
  if (a < 0) throw ContractViolation("mutate: invalid allele");
  std::vector<Allele> out(h.alleles().begin(), h.alleles().end());
  out[locus] = a;
  return Haplotype(std::move(out));
}

std::pair<Haplotype, Haplotype> break_hap(const Haplotype& h, std::size_t interval) {
  const LocusSet m = h.specified_mask();
  const bool valid = m != 0 && interval >= static_cast<std::size_t>(std::countr_zero(m)) &&
                     interval < static_cast<std::size_t>(31 - std::countl_zero(m));
  if (!valid) {
    throw ContractViolation("break: interval " + std::to_string(interval + 1) +
                            " is not a break interval of " + h.to_string());
  }
  std::vector<Allele> left(h.alleles().begin(), h.alleles().end());
  std::vector<Allele> right = left;
  for (std::size_t l = 0; l < left.size(); ++l) (l <= interval ? right : left)[l] = kUnspecified;
  return {Haplotype(std::move(left)), Haplotype(std::move(right))};
}

Haplotype restrict_to(const Haplotype& h, LocusSet keep) {
  std::vector<Allele> out(h.alleles().begin(), h.alleles().end());
  for (std::size_t l = 0; l < out.size(); ++l)
    if (!(keep >> l & 1U)) out[l] = kUnspecified;
  return Haplotype(std::move(out));
}

SampleConfig::SampleConfig(std::size_t num_loci,
                           std::initializer_list<std::pair<Haplotype, int>> entries)
    : num_loci_(num_loci) {
  for (const auto& [h, c] : entries) add(h, c);
}

SampleConfig SampleConfig::singleton(const Haplotype& h) {
  SampleConfig n(h.num_loci());
  n.add(h, 1);
  return n;
}

void SampleConfig::add(const Haplotype& h, int delta) {
  if (h.num_loci() != num_loci_) {
    throw ContractViolation("haplotype " + h.to_string() + " has " +
                            std::to_string(h.num_loci()) + " loci, configuration has " +
                            std::to_string(num_loci_));
  }
  if (h.is_sentinel()) {
    throw ContractViolation("the all-unspecified haplotype cannot appear in a sample");
  }
  auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                             [](const Entry& e, const Haplotype& x) { return e.haplotype < x; });
  const bool found = it != entries_.end() && it->haplotype == h;
  const int current = found ? it->count : 0;
  const int updated = current + delta;
  if (updated < 0) {
    throw ContractViolation("multiplicity of " + h.to_string() + " would become negative");
  }
  if (found) {
    if (updated == 0)
      entries_.erase(it);
    else
      it->count = updated;
  } else if (updated > 0) {
    entries_.insert(it, Entry{h, updated});
  }
  total_ += delta;
}

int SampleConfig::count(const Haplotype& h) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), h,
                             [](const Entry& e, const Haplotype& x) { return e.haplotype < x; });
  return it != entries_.end() && it->haplotype == h ? it->count : 0;
}

int SampleConfig::specified_mass() const {
  int mass = 0;
  for (const auto& e : entries_) mass += e.count * set_size(e.haplotype.specified_mask());
  return mass;
}

std::string SampleConfig::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& e : entries_) {
    if (!first) os << ", ";
    first = false;
    os << e.haplotype.to_string() << ':' << e.count;
  }
  os << '}';
  return os.str();
}

bool operator<(const SampleConfig& a, const SampleConfig& b) {
  if (a.num_loci_ != b.num_loci_) return a.num_loci_ < b.num_loci_;
  return std::lexicographical_compare(
      a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
      [](const SampleConfig::Entry& x, const SampleConfig::Entry& y) {
        if (auto c = x.haplotype <=> y.haplotype; c != 0) return c < 0;
        return x.count < y.count;
      });
}

std::size_t SampleConfigHash::operator()(const SampleConfig& n) const noexcept {
  std::size_t seed = n.num_loci();
  HaplotypeHash hh;
  for (const auto& e : n.entries()) {
    hash_combine(seed, hh(e.haplotype));
    hash_combine(seed, static_cast<std::size_t>(e.count));
  }
  return seed;
}

MarginalVec::MarginalVec(std::span<const int> alleles_per_locus) {
  per_locus_.reserve(alleles_per_locus.size());
  for (int k : alleles_per_locus) per_locus_.emplace_back(static_cast<std::size_t>(k), 0);
}

void MarginalVec::add_haplotype(const Haplotype& h, int sign) {
  for (std::size_t l = 0; l < h.num_loci(); ++l)
    if (h.is_specified(l)) add_allele(l, h[l], sign);
}

bool MarginalVec::has_negative() const {
  for (const auto& v : per_locus_)
    for (int x : v)
      if (x < 0) return true;
  return false;
}

MarginalVec marginalize(const SampleConfig& n, std::span<const int> alleles_per_locus) {
  if (alleles_per_locus.size() != n.num_loci()) {
    throw ContractViolation("marginalize: allele counts given for " +
                            std::to_string(alleles_per_locus.size()) + " loci, sample has " +
                            std::to_string(n.num_loci()));
  }
  MarginalVec m(alleles_per_locus);
  for (const auto& e : n.entries()) {
    for (std::size_t l = 0; l < e.haplotype.num_loci(); ++l) {
      if (!e.haplotype.is_specified(l)) continue;
      if (e.haplotype[l] >= alleles_per_locus[l]) {
        throw ContractViolation("allele " + std::to_string(e.haplotype[l] + 1) +
                                " out of range at locus " + std::to_string(l + 1));
      }
      m.add_allele(l, e.haplotype[l], e.count);
    }
  }
  return m;
}

int containment_count(const SampleConfig& n, const Haplotype& h, LocusSet loci) {
  if (!is_subset(h.specified_mask(), loci)) {
    throw ContractViolation("containment_count: S" + h.to_string() +
                            " is not a subset of the locus set");
  }
  int total = 0;
  for (const auto& e : n.entries())
    if (is_subset(loci, e.haplotype.specified_mask()) && contains(e.haplotype, h))
      total += e.count;
  return total;
}

double r_sum(LocusSet loci, std::span<const double> r) {
  if (set_size(loci) < 2) throw ContractViolation("r_sum needs at least two loci");
  const auto lo = static_cast<std::size_t>(std::countr_zero(loci));
  const auto hi = static_cast<std::size_t>(31 - std::countl_zero(loci));
  if (hi > r.size()) throw ContractViolation("r_sum: locus set exceeds the scale constants");
  double s = 0.0;
  for (std::size_t l = lo; l < hi; ++l) s += r[l];
  return s;
}

std::set<Haplotype> contributing_subhaplotypes(const SampleConfig& n) {
  std::set<Haplotype> out;
  out.insert(Haplotype::unspecified(n.num_loci()));
  for (const auto& e : n.entries()) {
    const LocusSet full = e.haplotype.specified_mask();
    // Walk every subset of S(h), including S(h) itself.
    for (LocusSet sub = full;; sub = (sub - 1) & full) {
      if (sub != 0) out.insert(restrict_to(e.haplotype, sub));
      if (sub == 0) break;
    }
  }
  return out;
}

}  // namespace coalrec
