#include "wcalc/selftest.hpp"

#include <iostream>

int main() {
  const wcalc::AcceptanceOptions opts{};
  const auto results = wcalc::run_acceptance(opts, &std::cerr);
  std::cout << wcalc::acceptance_report(results);
  int failures = 0;
  for (const auto& r : results)
    if (!r.pass) ++failures;
  return failures;
}
