#include "coalrec/one_locus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>

#include "coalrec/errors.hpp"

namespace coalrec {

namespace detail {

// Memoized p(.) for one locus, level by level in total sample size. Readers
// take a shared lock; a missing level is filled under the exclusive lock.
class OneLocusTable {
 public:
  double lookup(std::span<const int> counts, const LocusModel& model) {
    const int m = std::accumulate(counts.begin(), counts.end(), 0);
    std::vector<int> key(counts.begin(), counts.end());
    {
      std::shared_lock lock(mutex_);
      if (static_cast<std::size_t>(m) < levels_.size()) return levels_[m].at(key);
    }
    std::unique_lock lock(mutex_);
    while (levels_.size() <= static_cast<std::size_t>(m)) solve_next_level(model);
    return levels_[m].at(key);
  }

 private:
  void solve_next_level(const LocusModel& model);

  std::shared_mutex mutex_;
  std::vector<std::map<std::vector<int>, double>> levels_;
};

void OneLocusTable::solve_next_level(const LocusModel& model) {
  const int m = static_cast<int>(levels_.size());
  const int k = model.num_alleles();
  auto configs = compositions(m, k);
  std::map<std::vector<int>, double> level;

  if (m == 0) {
    level.emplace(configs.front(), 1.0);
    levels_.push_back(std::move(level));
    return;
  }
  if (m == 1) {
    for (const auto& c : configs) {
      const auto a = static_cast<std::size_t>(std::find(c.begin(), c.end(), 1) - c.begin());
      level.emplace(c, model.pi()[a]);
    }
    levels_.push_back(std::move(level));
    return;
  }

  std::map<std::vector<int>, Eigen::Index> index;
  for (std::size_t i = 0; i < configs.size(); ++i)
    index.emplace(configs[i], static_cast<Eigen::Index>(i));

  const auto dim = static_cast<Eigen::Index>(configs.size());
  const double theta = model.theta();
  const Eigen::MatrixXd& P = model.transition();
  const auto& previous = levels_[static_cast<std::size_t>(m - 1)];

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index row = 0; row < dim; ++row) {
    std::vector<int> c = configs[static_cast<std::size_t>(row)];
    A(row, row) += static_cast<double>(m) * (m - 1) + theta * m;
    for (int a = 0; a < k; ++a) {
      const int ca = c[static_cast<std::size_t>(a)];
      if (ca < 2) continue;
      c[static_cast<std::size_t>(a)] -= 1;
      b(row) += static_cast<double>(ca) * (ca - 1) * previous.at(c);
      c[static_cast<std::size_t>(a)] += 1;
    }
    // Mutation: a lineage of type b traces back to a parent of type a.
    for (int bb = 0; bb < k; ++bb) {
      const int cb = c[static_cast<std::size_t>(bb)];
      if (cb == 0) continue;
      for (int a = 0; a < k; ++a) {
        const double w = theta * P(a, bb) * cb;
        if (w == 0.0) continue;
        c[static_cast<std::size_t>(bb)] -= 1;
        c[static_cast<std::size_t>(a)] += 1;
        A(row, index.at(c)) -= w;
        c[static_cast<std::size_t>(a)] -= 1;
        c[static_cast<std::size_t>(bb)] += 1;
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > 1e-14)) {
    throw SolverError("one-locus level system of size " + std::to_string(m) +
                      " is numerically singular");
  }
  const Eigen::VectorXd p = lu.solve(b);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!std::isfinite(p(i))) throw SolverError("one-locus level solve produced a non-finite value");
    level.emplace(configs[static_cast<std::size_t>(i)], p(i));
  }
  levels_.push_back(std::move(level));
}

}  // namespace detail

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryTol = 1e-10;
constexpr double kPimTol = 1e-12;

void check_stochastic(const Eigen::MatrixXd& P) {
  if (P.rows() != P.cols() || P.rows() < 2) {
    throw ModelValidationError("P must be a square matrix with at least 2 alleles, got " +
                               std::to_string(P.rows()) + "x" + std::to_string(P.cols()));
  }
  for (Eigen::Index a = 0; a < P.rows(); ++a) {
    for (Eigen::Index b = 0; b < P.cols(); ++b) {
      if (!(P(a, b) >= 0.0 && P(a, b) <= 1.0)) {
        std::ostringstream os;
        os << "P row " << a + 1 << ": entry " << b + 1 << " = " << P(a, b)
           << " is outside [0, 1]";
        throw ModelValidationError(os.str());
      }
    }
    const double s = P.row(a).sum();
    if (std::abs(s - 1.0) > kRowSumTol) {
      std::ostringstream os;
      os.precision(17);
      os << "P row " << a + 1 << " sums to " << s << ", expected 1";
      throw ModelValidationError(os.str());
    }
  }
}

// Every allele must reach every other through positive transitions.
void check_irreducible(const Eigen::MatrixXd& P) {
  const auto k = P.rows();
  for (Eigen::Index start = 0; start < k; ++start) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    std::vector<Eigen::Index> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (Eigen::Index b = 0; b < k; ++b) {
        if (P(a, b) > 0.0 && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = true;
          stack.push_back(b);
        }
      }
    }
    for (Eigen::Index b = 0; b < k; ++b) {
      if (!seen[static_cast<std::size_t>(b)]) {
        throw ModelValidationError("P is reducible: allele " + std::to_string(b + 1) +
                                   " is not reachable from allele " +
                                   std::to_string(start + 1));
      }
    }
  }
}

}  // namespace

std::vector<double> stationary_distribution(const Eigen::MatrixXd& P) {
  check_stochastic(P);
  check_irreducible(P);
  const auto k = P.rows();
  // Identical rows are their own stationary vector; keep it exact.
  if (is_pim(P)) {
    std::vector<double> row(static_cast<std::size_t>(k));
    for (Eigen::Index a = 0; a < k; ++a) row[static_cast<std::size_t>(a)] = P(0, a);
    return row;
  }
  // (P^T - I) pi = 0 stacked on the normalization row 1^T pi = 1.
  Eigen::MatrixXd A(k + 1, k);
  A.topRows(k) = P.transpose() - Eigen::MatrixXd::Identity(k, k);
  A.row(k).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() != k) throw ModelValidationError("P has no unique stationary distribution");
  const Eigen::VectorXd pi = qr.solve(rhs);
  std::vector<double> out(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) {
    if (!(pi(a) > 0.0)) {
      throw ModelValidationError("stationary probability of allele " + std::to_string(a + 1) +
                                 " is not positive");
    }
    out[static_cast<std::size_t>(a)] = pi(a);
  }
  return out;
}

bool is_pim(const Eigen::MatrixXd& P) {
  for (Eigen::Index a = 1; a < P.rows(); ++a)
    if ((P.row(a) - P.row(0)).cwiseAbs().maxCoeff() > kPimTol) return false;
  return true;
}

LocusModel LocusModel::create(double theta, Eigen::MatrixXd transition,
                              std::optional<std::vector<double>> pi) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ModelValidationError("theta must be a positive finite real");
  }
  check_stochastic(transition);
  LocusModel model;
  if (pi) {
    check_irreducible(transition);
    if (static_cast<Eigen::Index>(pi->size()) != transition.rows()) {
      throw ModelValidationError("pi has " + std::to_string(pi->size()) + " entries, expected " +
                                 std::to_string(transition.rows()));
    }
    double total = 0.0;
    for (std::size_t a = 0; a < pi->size(); ++a) {
      if (!((*pi)[a] > 0.0)) {
        throw ModelValidationError("pi entry " + std::to_string(a + 1) + " is not positive");
      }
      total += (*pi)[a];
    }
    if (std::abs(total - 1.0) > kStationaryTol) {
      throw ModelValidationError("pi does not sum to 1");
    }
    const Eigen::Map<const Eigen::RowVectorXd> row(pi->data(), static_cast<Eigen::Index>(pi->size()));
    const Eigen::RowVectorXd residual = row * transition - row;
    for (Eigen::Index a = 0; a < residual.size(); ++a) {
      if (std::abs(residual(a)) > kStationaryTol) {
        std::ostringstream os;
        os << "pi is not stationary for P: (pi P - pi) at allele " << a + 1 << " is "
           << residual(a);
        throw ModelValidationError(os.str());
      }
    }
    model.pi_ = std::move(*pi);
  } else {
    model.pi_ = stationary_distribution(transition);
  }
  model.theta_ = theta;
  model.pim_ = coalrec::is_pim(transition);
  model.transition_ = std::move(transition);
  model.table_ = std::make_shared<detail::OneLocusTable>();
  return model;
}

LocusModel LocusModel::pim(double theta, std::vector<double> pi) {
  const auto k = static_cast<Eigen::Index>(pi.size());
  Eigen::MatrixXd P(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) P(a, b) = pi[static_cast<std::size_t>(b)];
  return create(theta, std::move(P), std::move(pi));
}

double LocusModel::probability(std::span<const int> counts) const {
  return pim_ ? wright_pim(counts, *this) : one_locus_exact(counts, *this);
}

double rising_factorial(double x, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= x + i;
  return out;
}

namespace {

void check_counts(std::span<const int> counts, const LocusModel& model) {
  if (static_cast<int>(counts.size()) != model.num_alleles()) {
    throw ContractViolation("one-locus configuration has " + std::to_string(counts.size()) +
                            " entries, model has " + std::to_string(model.num_alleles()) +
                            " alleles");
  }
  for (int c : counts)
    if (c < 0) throw ContractViolation("one-locus configuration has a negative count");
}

}  // namespace

double wright_pim(std::span<const int> counts, const LocusModel& model) {
  if (!model.is_pim()) {
    throw ContractViolation("wright_pim requires a parent-independent model; use one_locus_exact");
  }
  check_counts(counts, model);
  int n = 0;
  double numerator = 1.0;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    numerator *= rising_factorial(model.theta() * model.pi()[a], counts[a]);
    n += counts[a];
  }
  return numerator / rising_factorial(model.theta(), n);
}

double one_locus_exact(std::span<const int> counts, const LocusModel& model) {
  check_counts(counts, model);
  return model.table_->lookup(counts, model);
}

std::vector<std::vector<int>> compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  if (parts <= 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  // Recursive fill of positions 0..parts-2; the last takes the remainder.
  auto fill = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == parts - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  fill(fill, 0, total);
  return out;
}

}  // namespace coalrec
