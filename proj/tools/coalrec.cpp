// coalrec: sampling probabilities under the multi-locus coalescent with
// recombination, exactly and through the q0 + q1/rho expansion.
//
// Exit codes: 0 success, 1 validation battery failure, 2 input validation,
// 3 resource cap, 4 I/O, 5 numerical failure in the solver.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coalrec/errors.hpp"
#include "coalrec/exact_solver.hpp"
#include "coalrec/expansion.hpp"
#include "coalrec/io.hpp"
#include "coalrec/validation.hpp"

using namespace coalrec;

namespace {

enum ExitCode : int {
  kOk = 0,
  kBatteryFailure = 1,
  kInvalidInput = 2,
  kResourceCap = 3,
  kIo = 4,
  kSolver = 5,
};

struct Inputs {
  std::string model_path;
  std::string sample_path;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("model", in.model_path, "Model JSON file (loci, r, optional rho)")->required();
  cmd->add_option("sample", in.sample_path, "Sample JSON file")->required();
}

// The flag wins over the model file; a disagreement is reported.
ModelParams resolve_rho(const ModelParams& params, std::optional<double> flag) {
  if (flag) {
    if (!(*flag > 0.0)) throw ModelValidationError("--rho: must be positive");
    if (params.rho() && *params.rho() != *flag) {
      std::cerr << "note: --rho " << format_real(*flag) << " overrides model rho "
                << format_real(*params.rho()) << "\n";
    }
    return params.with_rho(*flag);
  }
  if (!params.rho()) throw ModelValidationError("rho: not given in the model file or by --rho");
  return params;
}

int cmd_q0(const Inputs& in) {
  const ModelParams params = load_model(in.model_path);
  const SampleConfig n = load_sample(in.sample_path, params);
  std::cout << "q0 " << format_real(q0(n, params)) << "\n";
  const auto factors = q0_factors(n, params);
  for (std::size_t l = 0; l < factors.size(); ++l)
    std::cout << "locus " << l + 1 << " " << format_real(factors[l]) << "\n";
  return kOk;
}

int cmd_q1(const Inputs& in, const std::string& method) {
  const ModelParams params = load_model(in.model_path);
  const SampleConfig n = load_sample(in.sample_path, params);
  if (method == "closed") {
    std::cout << "q1 " << format_real(q1_closed(n, params)) << "\n";
  } else if (method == "recursive") {
    std::cout << "q1 " << format_real(q1_recursive(n, params)) << "\n";
  } else {
    const double closed = q1_closed(n, params);
    const double recursive = q1_recursive(n, params);
    std::cout << "q1_closed " << format_real(closed) << "\n"
              << "q1_recursive " << format_real(recursive) << "\n"
              << "difference " << format_real(std::abs(closed - recursive)) << "\n";
  }
  return kOk;
}

int cmd_exact(const Inputs& in, std::optional<double> rho, const ExactOptions& options) {
  const ModelParams params = resolve_rho(load_model(in.model_path), rho);
  const SampleConfig n = load_sample(in.sample_path, params);
  const auto start = std::chrono::steady_clock::now();
  const ExactResult result = solve_exact_detailed(n, params, options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "rho " << format_real(*params.rho()) << "\n"
            << "q " << format_real(result.q) << "\n"
            << "states " << result.num_states << "\n";
  // Timing goes to stderr so stdout stays byte-identical across runs.
  std::fprintf(stderr, "wall_time_s %.3f\n", seconds);
  return kOk;
}

int cmd_compare(const Inputs& in, const std::vector<double>& rhos, const std::string& out_path,
                const ExactOptions& options) {
  const ModelParams params = load_model(in.model_path);
  const SampleConfig n = load_sample(in.sample_path, params);
  for (double rho : rhos)
    if (!(rho > 0.0)) throw ModelValidationError("--rho-list: values must be positive, got " + format_real(rho));
  const auto rows = compare_sweep(n, params.without_rho(), rhos, options);

  std::ostringstream csv;
  csv << "rho,q_exact,q_expansion,abs_err,scaled_err\n";
  for (const auto& row : rows) {
    csv << format_real(row.rho) << ',' << format_real(row.q_exact) << ','
        << format_real(row.q_expansion) << ',' << format_real(row.abs_err) << ','
        << format_real(row.scaled_err) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
    return kOk;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError("cannot open " + out_path + " for writing");
  file << csv.str();
  file.close();
  if (!file) throw IoError("write to " + out_path + " failed");
  return kOk;
}

int cmd_validate(std::uint64_t seed, const std::string& level, bool tamper) {
  BatteryOptions options;
  options.seed = seed;
  options.level = level == "full" ? BatteryLevel::Full : BatteryLevel::Quick;
  options.tamper = tamper;
  const auto results = run_battery(options);

  std::cout << "seed " << seed << " level " << level << "\n";
  const CheckResult* first_failure = nullptr;
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%s  %-62s n=%-5zu worst=%.3e tol=%.1e\n",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.instances, r.worst, r.tolerance);
    std::cout << line;
    if (!r.passed && !first_failure) first_failure = &r;
  }
  if (!first_failure) {
    std::cout << "all " << results.size() << " checks passed\n";
    return kOk;
  }
  std::cout << "first failure: " << first_failure->name << "\n";
  if (first_failure->failing_instance) std::cout << *first_failure->failing_instance << "\n";
  return kBatteryFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalescent-with-recombination sampling probabilities: exact solves and the "
               "q0 + q1/rho expansion."};
  app.require_subcommand(1);

  Inputs in;
  ExactOptions exact_options;

  auto* q0_cmd = app.add_subcommand("q0", "Print q0 and its per-locus factors");
  add_inputs(q0_cmd, in);

  std::string method = "closed";
  auto* q1_cmd = app.add_subcommand("q1", "Print the first-order coefficient q1");
  add_inputs(q1_cmd, in);
  q1_cmd->add_option("--method", method, "closed, recursive, or auto (both and their difference)")
      ->check(CLI::IsMember({"closed", "recursive", "auto"}))
      ->capture_default_str();

  std::optional<double> rho;
  auto* exact_cmd = app.add_subcommand("exact", "Solve the exact recursion at one rho");
  add_inputs(exact_cmd, in);
  exact_cmd->add_option("--rho", rho, "Recombination scale; overrides rho in the model file");
  exact_cmd->add_option("--state-cap", exact_options.state_cap, "Maximum number of states")
      ->capture_default_str();

  std::vector<double> rhos;
  std::string out_path;
  auto* compare_cmd = app.add_subcommand("compare", "CSV of exact vs expansion over rho values");
  add_inputs(compare_cmd, in);
  compare_cmd->add_option("--rho-list", rhos, "Comma-separated rho values")
      ->required()
      ->delimiter(',');
  compare_cmd->add_option("--out", out_path, "Write the CSV here instead of stdout");
  compare_cmd->add_option("--state-cap", exact_options.state_cap, "Maximum number of states")
      ->capture_default_str();

  std::uint64_t seed = BatteryOptions{}.seed;
  std::string level = "quick";
  bool tamper = false;
  auto* validate_cmd = app.add_subcommand("validate", "Run the cross-validation battery");
  validate_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  validate_cmd->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();
  // Test hook: forces every check to fail.
  validate_cmd->add_flag("--tamper", tamper)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*q0_cmd) return cmd_q0(in);
    if (*q1_cmd) return cmd_q1(in, method);
    if (*exact_cmd) return cmd_exact(in, rho, exact_options);
    if (*compare_cmd) return cmd_compare(in, rhos, out_path, exact_options);
    if (*validate_cmd) return cmd_validate(seed, level, tamper);
  } catch (const ModelValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "; raise --state-cap (now " << e.cap()
              << ") or reduce the sample\n";
    return kResourceCap;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kOk;
}
