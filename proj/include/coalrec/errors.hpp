#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coalrec {

/// A caller broke an operation's precondition (incompatible coalesce,
/// mutation at an unspecified locus, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Model or sample input failed validation. The message names the offending
/// field or row.
class ModelValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The reachable state space grew beyond the configured cap.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(std::size_t cap, std::size_t reached)
      : std::runtime_error("state-space cap of " + std::to_string(cap) +
                           " exceeded (reached " + std::to_string(reached) +
                           " states)"),
        cap_(cap),
        reached_(reached) {}

  std::size_t cap() const noexcept { return cap_; }
  std::size_t reached() const noexcept { return reached_; }

 private:
  std::size_t cap_;
  std::size_t reached_;
};

/// A factorization or level solve came out numerically singular.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coalrec
