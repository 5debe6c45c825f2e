// Runs every acceptance criterion; exit status 0 iff all pass.
#include <iostream>

#include "kgl/acceptance.hpp"

int main() {
  const auto results = kgl::run_acceptance(std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
