#pragma once

#include <string>
#include <vector>

namespace ifsm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  /// Only run checks whose name contains this substring (empty runs all).
  std::string filter;
  /// Debug aid: hand an order-permuted fixed point to the stability check in
  /// place of the correctly ordered one, which must then fail.
  bool inject_permuted_fixed_point = false;
};

/// Names of all checks, in execution order.
std::vector<std::string> verify_check_names();

/// Runs the seeded invariant suite. Never throws for a failing check; an
/// exception inside a check is reported as a failure of that check.
std::vector<CheckResult> verify(const VerifyOptions& options = {});

}  // namespace ifsm
