#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace kgl {

struct CriterionResult {
  int id = 0;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id = 0;
  std::string title;
  double budget_seconds = 0.0;  // exceeding it fails the criterion
  std::function<bool(std::string& detail)> run;
};

/// The ten acceptance criteria in order.
const std::vector<Criterion>& acceptance_criteria();

/// Runs the selected criteria (all when ids is empty), printing one line
/// per criterion to os. Exceptions count as failures.
std::vector<CriterionResult> run_acceptance(std::ostream& os, const std::vector<int>& ids = {});

void list_acceptance(std::ostream& os);

}  // namespace kgl
