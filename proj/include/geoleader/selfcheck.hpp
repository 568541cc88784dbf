#pragma once

#include <functional>
#include <string>
#include <vector>

namespace geoleader {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Deterministic invariant suites shared by the CLI `selftest` and the
/// acceptance binary.
CriterionResult check_row_sums();
CriterionResult check_y_harmonicity();
CriterionResult check_y_kernel_convergence();
CriterionResult check_n_matrix_power();
CriterionResult check_n_kernel_limit();

/// The fast subset in order: 1, 2, 3, 6, 8.
std::vector<CriterionResult> run_selftest();

/// Runs `body`, stores the elapsed time and turns exceptions into failures.
CriterionResult timed(int id, const std::string& name,
                      const std::function<bool(std::string&)>& body);

}  // namespace geoleader
