#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stirap {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Built-in invariant suite run by `run --check`: eigen-system closed forms,
/// Hermiticity, trace/purity gates, pure vs density, tolerance convergence,
/// full vs effective model, delay symmetry and thermometry round trips.
std::vector<CheckResult> run_invariant_checks(int jobs, double tol);

void print_check_table(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace stirap
