#include "coalrec/model.hpp"

#include <cmath>

#include "coalrec/errors.hpp"

namespace coalrec {

namespace {

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ModelValidationError("rho must be a positive finite real");
  }
}

}  // namespace

ModelParams ModelParams::create(std::vector<LocusModel> loci, std::vector<double> r,
                                std::optional<double> rho) {
  if (loci.size() < 2) {
    throw ModelValidationError("model needs at least 2 loci, got " + std::to_string(loci.size()));
  }
  if (loci.size() > kMaxLoci) {
    throw ModelValidationError("model has more than " + std::to_string(kMaxLoci) + " loci");
  }
  if (r.size() != loci.size() - 1) {
    throw ModelValidationError("r has " + std::to_string(r.size()) + " entries, expected " +
                               std::to_string(loci.size() - 1));
  }
  for (std::size_t l = 0; l < r.size(); ++l) {
    if (!(r[l] > 0.0) || !std::isfinite(r[l])) {
      throw ModelValidationError("r[" + std::to_string(l) + "] must be a positive finite real");
    }
  }
  if (rho) check_rho(*rho);
  ModelParams p;
  for (const auto& m : loci) p.alleles_.push_back(m.num_alleles());
  p.loci_ = std::move(loci);
  p.r_ = std::move(r);
  p.rho_ = rho;
  return p;
}

ModelParams ModelParams::with_rho(double rho) const {
  check_rho(rho);
  ModelParams p = *this;
  p.rho_ = rho;
  return p;
}

ModelParams ModelParams::without_rho() const {
  ModelParams p = *this;
  p.rho_.reset();
  return p;
}

ModelParams ModelParams::scaled_r(double factor) const {
  if (!(factor > 0.0)) throw ContractViolation("r scaling factor must be positive");
  ModelParams p = *this;
  for (double& x : p.r_) x *= factor;
  return p;
}

void ModelParams::check_sample(const SampleConfig& n) const {
  if (n.num_loci() != num_loci()) {
    throw ModelValidationError("sample haplotypes have " + std::to_string(n.num_loci()) +
                               " loci, model has " + std::to_string(num_loci()));
  }
  if (n.empty()) throw ModelValidationError("sample is empty");
  for (const auto& e : n.entries()) {
    for (std::size_t l = 0; l < num_loci(); ++l) {
      const Allele a = e.haplotype[l];
      if (a != kUnspecified && a >= alleles_[l]) {
        throw ModelValidationError("haplotype " + e.haplotype.to_string() + ": allele " +
                                   std::to_string(a + 1) + " at locus " + std::to_string(l + 1) +
                                   " exceeds K = " + std::to_string(alleles_[l]));
      }
    }
  }
}

}  // namespace coalrec
