#pragma once

// Helpers for writing haplotypes in the 1-based notation used in the docs:
// hap("1,*,2") is allele 0 at locus 0, unspecified at locus 1, allele 1 at locus 2.

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coalrec/haplotype.hpp"
#include "coalrec/model.hpp"
#include "coalrec/one_locus.hpp"

namespace coalrec::test {

inline Haplotype hap(const std::string& text) {
  std::vector<Allele> alleles;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) alleles.push_back(item == "*" ? kUnspecified : std::stoi(item) - 1);
  return Haplotype(std::move(alleles));
}

inline SampleConfig sample(std::initializer_list<std::pair<const char*, int>> entries) {
  SampleConfig n;
  bool first = true;
  for (const auto& [text, count] : entries) {
    const Haplotype h = hap(text);
    if (first) n = SampleConfig(h.num_loci());
    first = false;
    n.add(h, count);
  }
  return n;
}

inline LocusModel uniform_pim(double theta = 1.0, int k = 2) {
  return LocusModel::pim(theta, std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

/// theta = 1, PIM uniform on two alleles at every locus.
inline ModelParams uniform_params(std::vector<double> r, std::optional<double> rho = std::nullopt) {
  std::vector<LocusModel> loci(r.size() + 1, uniform_pim());
  return ModelParams::create(std::move(loci), std::move(r), rho);
}

inline LocusModel two_state(double theta, double p12, double p21) {
  Eigen::MatrixXd P(2, 2);
  P << 1.0 - p12, p12, p21, 1.0 - p21;
  return LocusModel::create(theta, P);
}

}  // namespace coalrec::test
