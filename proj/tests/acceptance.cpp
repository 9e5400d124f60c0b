// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <iostream>

#include "das/validation.hpp"

int main() {
  const das::validation::Options opt;
  const auto results = das::validation::run_acceptance(opt, &std::cout);
  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; });
  std::cout << (results.size() - failed) << "/" << results.size() << " acceptance checks passed\n";
  return failed == 0 ? 0 : 1;
}
