#include "coalrec/exact_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "coalrec/errors.hpp"

namespace coalrec {

namespace {

// Visits every off-diagonal transition of the recursion row for `n`:
// visit(coefficient, target), with the coefficient in long double. Coefficients use rho_l = r_l * rho; pass
// rho = 1 when only the targets matter. Identity mutations are not visited.
template <typename Visit>
void for_each_transition(const SampleConfig& n, const ModelParams& params, long double rho,
                         Visit&& visit) {
  const auto entries = n.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Haplotype& h = entries[i].haplotype;
    const long double nh = entries[i].count;

    if (entries[i].count >= 2) {
      SampleConfig m = n;
      m.add(h, -1);
      visit(nh * (nh - 1), std::move(m));
    }

    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (j == i) continue;
      const Haplotype& g = entries[j].haplotype;
      if (!is_compatible(h, g)) continue;
      SampleConfig m = n;
      m.add(h, -1);
      m.add(g, -1);
      m.add(coalesce(h, g), 1);
      visit(nh * entries[j].count, std::move(m));
    }

    for (std::size_t l : specified_loci(h)) {
      const LocusModel& locus = params.locus(l);
      for (Allele a = 0; a < locus.num_alleles(); ++a) {
        if (a == h[l]) continue;
        const long double w = locus.transition()(a, h[l]);
        if (w == 0.0) continue;
        SampleConfig m = n;
        m.add(h, -1);
        m.add(mutate(h, l, a), 1);
        visit(nh * static_cast<long double>(locus.theta()) * w, std::move(m));
      }
    }

    for (std::size_t l : break_intervals(h)) {
      auto [left, right] = break_hap(h, l);
      SampleConfig m = n;
      m.add(h, -1);
      m.add(left, 1);
      m.add(right, 1);
      visit(nh * (static_cast<long double>(params.r()[l]) * rho), std::move(m));
    }
  }
}

double boundary_value(const Haplotype& h, const ModelParams& params) {
  double q = 1.0;
  for (std::size_t l : specified_loci(h)) q *= params.locus(l).pi()[static_cast<std::size_t>(h[l])];
  return q;
}

double require_rho(const ModelParams& params) {
  if (!params.rho()) throw ContractViolation("exact solve requires rho");
  return *params.rho();
}

}  // namespace

std::size_t StateSpace::position(const SampleConfig& n) const {
  auto it = index_.find(n);
  return it == index_.end() ? states_.size() : it->second;
}

StateSpace reachable_states(const SampleConfig& n, const ModelParams& params,
                            const ExactOptions& options) {
  return reachable_states(std::span<const SampleConfig>(&n, 1), params, options);
}

StateSpace reachable_states(std::span<const SampleConfig> roots, const ModelParams& params,
                            const ExactOptions& options) {
  StateSpace space;
  auto insert = [&](const SampleConfig& m) {
    if (space.index_.contains(m)) return;
    if (space.states_.size() >= options.state_cap)
      throw ResourceLimitError(options.state_cap, space.states_.size() + 1);
    space.index_.emplace(m, space.states_.size());
    space.states_.push_back(m);
  };
  for (const auto& root : roots) {
    params.check_sample(root);
    insert(root);
  }

  std::vector<SampleConfig> fresh;
  for (std::size_t next = 0; next < space.states_.size(); ++next) {
    if (space.states_[next].is_singleton()) continue;
    fresh.clear();
    const SampleConfig current = space.states_[next];
    for_each_transition(current, params, 1.0L, [&](long double, SampleConfig&& m) {
      if (!space.index_.contains(m)) fresh.push_back(std::move(m));
    });
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    for (const auto& m : fresh) insert(m);
  }
  return space;
}

long double recursion_diagonal(const SampleConfig& n, const ModelParams& params) {
  const long double rho = require_rho(params);
  const long double total = n.total();
  long double diag = 0.0L;
  for (const auto& e : n.entries()) {
    long double rate = total - 1.0L;
    for (std::size_t l : specified_loci(e.haplotype)) {
      const LocusModel& locus = params.locus(l);
      const auto a = e.haplotype[l];
      // Mutation back to the same allele leaves the state unchanged.
      rate += static_cast<long double>(locus.theta()) * (1.0L - locus.transition()(a, a));
    }
    for (std::size_t l : break_intervals(e.haplotype))
      rate += static_cast<long double>(params.r()[l]) * rho;
    diag += e.count * rate;
  }
  return diag;
}

LinearSystem build_system(const StateSpace& space, const ModelParams& params) {
  const long double rho = require_rho(params);
  const auto dim = static_cast<Eigen::Index>(space.size());
  std::vector<Eigen::Triplet<long double>> triplets;
  LinearSystem sys;
  sys.rhs_ext = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(dim);

  for (Eigen::Index row = 0; row < dim; ++row) {
    const SampleConfig& n = space.states()[static_cast<std::size_t>(row)];
    triplets.emplace_back(row, row, 1.0L);
    if (n.is_singleton()) {
      sys.rhs_ext(row) = boundary_value(n.entries().front().haplotype, params);
      continue;
    }
    const long double diag = recursion_diagonal(n, params);
    for_each_transition(n, params, rho, [&](long double w, SampleConfig&& m) {
      const std::size_t col = space.position(m);
      if (col == space.size()) throw ContractViolation("state space is not closed: " + m.to_string());
      triplets.emplace_back(row, static_cast<Eigen::Index>(col), -w / diag);
    });
  }
  sys.matrix_ext.resize(dim, dim);
  sys.matrix_ext.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix_ext.makeCompressed();
  sys.matrix = sys.matrix_ext.cast<double>();
  sys.rhs = sys.rhs_ext.cast<double>();
  return sys;
}

namespace {

// Coalescence never raises the specified mass sum_h n_h |S(h)| and the other
// transitions keep it, so grouping states by mass makes the system block
// lower triangular. Each diagonal block is factorized on its own.
class BlockTriangularSolver {
 public:
  BlockTriangularSolver(const StateSpace& space, const Eigen::SparseMatrix<double>& matrix) {
    std::map<int, std::vector<Eigen::Index>> by_mass;
    for (std::size_t i = 0; i < space.size(); ++i)
      by_mass[space.states()[i].specified_mass()].push_back(static_cast<Eigen::Index>(i));

    block_of_.assign(space.size(), 0);
    local_of_.assign(space.size(), 0);
    for (auto& [mass, members] : by_mass) {
      const std::size_t b = blocks_.size();
      for (std::size_t k = 0; k < members.size(); ++k) {
        block_of_[static_cast<std::size_t>(members[k])] = b;
        local_of_[static_cast<std::size_t>(members[k])] = static_cast<Eigen::Index>(k);
      }
      blocks_.push_back(Block{std::move(members), {}, {}});
    }

    // Split each row into its diagonal block and the coupling to lower blocks.
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rows(matrix);
    for (auto& block : blocks_) {
      const auto dim = static_cast<Eigen::Index>(block.members.size());
      std::vector<Eigen::Triplet<double>> diag;
      std::vector<Eigen::Triplet<double>> lower;
      const std::size_t b = static_cast<std::size_t>(&block - blocks_.data());
      for (Eigen::Index k = 0; k < dim; ++k) {
        const Eigen::Index row = block.members[static_cast<std::size_t>(k)];
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, row); it; ++it) {
          const auto col = static_cast<std::size_t>(it.col());
          if (block_of_[col] == b)
            diag.emplace_back(k, local_of_[col], it.value());
          else if (block_of_[col] < b)
            lower.emplace_back(k, it.col(), it.value());
          else
            throw SolverError("transition raises the specified mass");
        }
      }
      Eigen::SparseMatrix<double> a(dim, dim);
      a.setFromTriplets(diag.begin(), diag.end());
      a.makeCompressed();
      block.coupling.resize(dim, matrix.cols());
      block.coupling.setFromTriplets(lower.begin(), lower.end());
      block.lu = std::make_unique<Lu>();
      block.lu->compute(a);
      if (block.lu->info() != Eigen::Success) {
        throw SolverError("sparse factorization failed: " + block.lu->lastErrorMessage());
      }
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    for (const auto& block : blocks_) {
      const auto dim = static_cast<Eigen::Index>(block.members.size());
      Eigen::VectorXd local(dim);
      for (Eigen::Index k = 0; k < dim; ++k) local(k) = rhs(block.members[static_cast<std::size_t>(k)]);
      local -= block.coupling * x;
      const Eigen::VectorXd y = block.lu->solve(local);
      if (block.lu->info() != Eigen::Success) throw SolverError("sparse solve failed");
      for (Eigen::Index k = 0; k < dim; ++k) x(block.members[static_cast<std::size_t>(k)]) = y(k);
    }
    return x;
  }

 private:
  using Lu = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;
  struct Block {
    std::vector<Eigen::Index> members;
    Eigen::SparseMatrix<double, Eigen::RowMajor> coupling;
    std::unique_ptr<Lu> lu;
  };

  std::vector<Block> blocks_;
  std::vector<std::size_t> block_of_;
  std::vector<Eigen::Index> local_of_;
};

}  // namespace

std::vector<double> solve_all(const StateSpace& space, const ModelParams& params,
                              const ExactOptions& options) {
  const LinearSystem sys = build_system(space, params);
  const BlockTriangularSolver solver(space, sys.matrix);
  Eigen::VectorXd x = solver.solve(sys.rhs);

  // Residuals against the extended-precision system, corrections in double.
  for (int step = 0; step < options.refinement_steps; ++step) {
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> residual =
        sys.rhs_ext - sys.matrix_ext * x.cast<long double>();
    x += solver.solve(residual.cast<double>());
  }

  std::vector<double> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x(i))) throw SolverError("exact solve produced a non-finite value");
    out[static_cast<std::size_t>(i)] = x(i);
  }
  return out;
}

ExactResult solve_exact_detailed(const SampleConfig& n, const ModelParams& params,
                                 const ExactOptions& options) {
  require_rho(params);
  const StateSpace space = reachable_states(n, params, options);
  const auto q = solve_all(space, params, options);
  return {q[space.position(n)], space.size()};
}

double solve_exact(const SampleConfig& n, const ModelParams& params, const ExactOptions& options) {
  return solve_exact_detailed(n, params, options).q;
}

std::vector<Haplotype> fully_specified_haplotypes(std::span<const int> alleles_per_locus) {
  std::vector<Haplotype> out;
  std::vector<Allele> cur(alleles_per_locus.size(), 0);
  while (true) {
    out.emplace_back(cur);
    std::size_t l = cur.size();
    while (l > 0) {
      --l;
      if (++cur[l] < alleles_per_locus[l]) break;
      cur[l] = 0;
      if (l == 0) return out;
    }
    if (cur.empty()) return out;
  }
}

double ordered_normalization(int size, const ModelParams& params, const ExactOptions& options,
                             std::size_t config_cap) {
  if (size < 1) throw ContractViolation("ordered_normalization needs size >= 1");
  const auto haplotypes = fully_specified_haplotypes(params.alleles_per_locus());
  const auto counts = compositions(size, static_cast<int>(haplotypes.size()));
  if (counts.size() > config_cap) throw ResourceLimitError(config_cap, counts.size());

  std::vector<SampleConfig> roots;
  std::vector<double> orderings;
  for (const auto& c : counts) {
    SampleConfig n(params.num_loci());
    double ways = std::tgamma(size + 1.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      n.add(haplotypes[i], c[i]);
      ways /= std::tgamma(c[i] + 1.0);
    }
    roots.push_back(std::move(n));
    orderings.push_back(std::round(ways));
  }
  const StateSpace space = reachable_states(roots, params, options);
  const auto q = solve_all(space, params, options);
  long double total = 0.0L;
  for (std::size_t i = 0; i < roots.size(); ++i)
    total += static_cast<long double>(orderings[i]) * q[space.position(roots[i])];
  return static_cast<double>(total);
}

}  // namespace coalrec
