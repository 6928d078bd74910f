#pragma once

// End-to-end acceptance checks, one per criterion, shared by the acceptance
// test binary and `strz verify`.

#include <string>
#include <vector>

namespace strz::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// One "name: value (limit)" line per measured quantity; failures first.
  std::vector<std::string> details;
  double seconds = 0.0;
};

int criterion_count();
std::string criterion_title(int id);

/// Runs one criterion; never throws (errors become a failed result).
CriterionResult run_criterion(int id);

/// Runs the listed criteria (all when empty) in order.
std::vector<CriterionResult> run_all(const std::vector<int>& ids = {});

/// "AC<id> PASS|FAIL <title> (<seconds>s)".
std::string summary_line(const CriterionResult& r);

}  // namespace strz::acceptance
