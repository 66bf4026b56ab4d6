#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wcalc {

struct AcceptanceOptions {
  std::uint64_t seed = 20240801;
};

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;  // deterministic: no timings, only computed quantities
};

// Criteria 1-9 of the acceptance battery; `progress` (if given) receives
// per-criterion status lines including timings, which are NOT part of the
// deterministic report.
std::vector<CriterionResult> run_criteria(const AcceptanceOptions& opts,
                                          std::ostream* progress = nullptr);

// Full battery: runs the criteria twice and adds the determinism criterion
// comparing the two reports byte for byte.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            std::ostream* progress = nullptr);

std::string acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace wcalc
