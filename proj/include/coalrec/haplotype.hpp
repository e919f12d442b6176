#pragma once

// Haplotype algebra: alleles-or-unspecified vectors, sample configurations
// (multisets of haplotypes), their per-locus marginals, and the mutate /
// coalesce / break operators that drive the coalescent recursions.
//
// Loci, break intervals and alleles are 0-based throughout the library.
// Break interval l sits between loci l and l+1 and is weighted by r[l].

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coalrec {

using Allele = std::int32_t;
inline constexpr Allele kUnspecified = -1;

/// Bitmask over loci; bit l set means locus l is in the set.
using LocusSet = std::uint32_t;
inline constexpr std::size_t kMaxLoci = 31;

inline int set_size(LocusSet s) { return __builtin_popcount(s); }
inline bool is_subset(LocusSet a, LocusSet b) { return (a & ~b) == 0; }
inline LocusSet full_set(std::size_t num_loci) {
  return num_loci >= 32 ? ~LocusSet{0} : (LocusSet{1} << num_loci) - 1;
}

class Haplotype {
 public:
  Haplotype() = default;
  /// Entries are 0-based allele indices or kUnspecified. The all-unspecified
  /// vector is allowed here; it is the sentinel used by the q1 sums and is
  /// rejected wherever a real sample haplotype is required.
  explicit Haplotype(std::vector<Allele> alleles);

  /// The all-unspecified sentinel of length num_loci.
  static Haplotype unspecified(std::size_t num_loci);

  std::size_t num_loci() const { return alleles_.size(); }
  Allele operator[](std::size_t locus) const { return alleles_[locus]; }
  bool is_specified(std::size_t locus) const { return alleles_[locus] != kUnspecified; }
  bool is_sentinel() const { return mask_ == 0; }
  LocusSet specified_mask() const { return mask_; }
  std::span<const Allele> alleles() const { return alleles_; }

  /// 1-based rendering, e.g. "(1,*,2)".
  std::string to_string() const;

  friend bool operator==(const Haplotype& a, const Haplotype& b) { return a.alleles_ == b.alleles_; }
  /// Lexicographic, with Unspecified ordered after every specified allele.
  friend std::strong_ordering operator<=>(const Haplotype& a, const Haplotype& b);

 private:
  std::vector<Allele> alleles_;
  LocusSet mask_ = 0;
};

struct HaplotypeHash {
  std::size_t operator()(const Haplotype& h) const noexcept;
};

/// S(h) as sorted 0-based locus indices.
std::vector<std::size_t> specified_loci(const Haplotype& h);

/// B(h) = {min S(h), ..., max S(h) - 1}; empty for single-locus haplotypes.
std::vector<std::size_t> break_intervals(const Haplotype& h);

/// max S(h) - min S(h), i.e. |B(h)|.
std::size_t span_length(const Haplotype& h);

bool is_compatible(const Haplotype& h, const Haplotype& g);

/// h contains g: S(h) is a superset of S(g) and h agrees with g on S(g).
bool contains(const Haplotype& h, const Haplotype& g);

/// Throws ContractViolation if the inputs are incompatible.
Haplotype coalesce(const Haplotype& h, const Haplotype& g);

/// Substitutes allele a at locus l; l must be specified in h.
Haplotype mutate(const Haplotype& h, std::size_t locus, Allele a);

/// Splits h at break interval l into (h[l-], h[l+]).
std::pair<Haplotype, Haplotype> break_hap(const Haplotype& h, std::size_t interval);

/// Keeps the alleles of h on the loci in `keep` and blanks the rest.
Haplotype restrict_to(const Haplotype& h, LocusSet keep);

/// A multiset of haplotypes with positive multiplicities, stored sorted so
/// that equal configurations compare and hash identically.
class SampleConfig {
 public:
  struct Entry {
    Haplotype haplotype;
    int count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  SampleConfig() = default;
  explicit SampleConfig(std::size_t num_loci) : num_loci_(num_loci) {}
  SampleConfig(std::size_t num_loci, std::initializer_list<std::pair<Haplotype, int>> entries);

  /// e_h
  static SampleConfig singleton(const Haplotype& h);

  /// Adds `delta` copies of h. The resulting multiplicity must be >= 0; the
  /// entry disappears when it reaches zero. Sentinel haplotypes are rejected.
  void add(const Haplotype& h, int delta = 1);

  /// Multiplicity of h, 0 when absent.
  int count(const Haplotype& h) const;

  std::size_t num_loci() const { return num_loci_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t distinct() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int total() const { return total_; }
  bool is_singleton() const { return total_ == 1; }

  /// Sum over haplotypes of n_h * |S(h)|.
  int specified_mass() const;

  std::string to_string() const;

  friend bool operator==(const SampleConfig& a, const SampleConfig& b) {
    return a.num_loci_ == b.num_loci_ && a.entries_ == b.entries_;
  }
  friend bool operator<(const SampleConfig& a, const SampleConfig& b);

 private:
  std::size_t num_loci_ = 0;
  int total_ = 0;
  std::vector<Entry> entries_;
};

struct SampleConfigHash {
  std::size_t operator()(const SampleConfig& n) const noexcept;
};

/// Per-locus allele-count vectors. Entries may go negative after
/// subtraction; consumers treat such vectors as probability zero.
class MarginalVec {
 public:
  MarginalVec() = default;
  explicit MarginalVec(std::span<const int> alleles_per_locus);
  explicit MarginalVec(std::vector<std::vector<int>> per_locus) : per_locus_(std::move(per_locus)) {}

  std::size_t num_loci() const { return per_locus_.size(); }
  std::span<const int> locus(std::size_t l) const { return per_locus_[l]; }
  int at(std::size_t l, Allele a) const { return per_locus_[l][static_cast<std::size_t>(a)]; }

  /// Adds sign * (marginal of e_h).
  void add_haplotype(const Haplotype& h, int sign = 1);
  void add_allele(std::size_t l, Allele a, int delta) {
    per_locus_[l][static_cast<std::size_t>(a)] += delta;
  }
  bool has_negative() const;

  friend bool operator==(const MarginalVec&, const MarginalVec&) = default;

 private:
  std::vector<std::vector<int>> per_locus_;
};

/// Entry (l, a) = number of sample haplotypes carrying allele a at locus l.
MarginalVec marginalize(const SampleConfig& n, std::span<const int> alleles_per_locus);

/// Sum of n_h' over h' specified on all of X and containing h. Requires
/// S(h) to be a subset of X; h may be the sentinel.
int containment_count(const SampleConfig& n, const Haplotype& h, LocusSet loci);

/// r_X = r[min X] + ... + r[max X - 1]; requires |X| >= 2.
double r_sum(LocusSet loci, std::span<const double> r);

/// Restrictions of every sample haplotype to every subset of its specified
/// loci, deduplicated, plus the sentinel. Costs O(sum_h 2^|S(h)|).
std::set<Haplotype> contributing_subhaplotypes(const SampleConfig& n);

}  // namespace coalrec
