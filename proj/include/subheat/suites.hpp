#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace subheat {

struct SuiteCheck {
  std::string name;
  double target;
  double achieved;
  double std_error;
  /// Largest |achieved - target| accepted, after any statistical allowance.
  double tolerance;
  bool pass;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteCheck> checks;
  bool pass = true;
  double wall_time = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = 7;
  unsigned workers = 1;
  /// Reduced path counts for a fast smoke run.
  bool quick = false;
};

/// Names accepted by run_suite, in execution order ("all" is not included).
const std::vector<std::string>& suite_names();

/// Runs one convergence or identity suite. Throws ConfigError for an unknown name.
SuiteResult run_suite(std::string_view name, const SuiteOptions& options);

}  // namespace subheat
