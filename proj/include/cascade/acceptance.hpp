#pragma once

#include <string>
#include <vector>

#include "cascade/generator.hpp"

namespace cascade {

struct CriterionResult {
  std::string id;      // "A1" .. "A11"
  bool pass = false;
  double seconds = 0.0;
  std::string detail;  // measured values vs thresholds
};

// Runs the full acceptance suite. `reference` is the closed-form conservative
// law (0.25, 0.75) used as the exact oracle; `canonical` is the signed
// non-conservative law the statistical criteria target.
std::vector<CriterionResult> run_acceptance(const GeneratorSpec& canonical,
                                            const GeneratorSpec& reference);

// Prints one "<id> PASS|FAIL (<seconds>s) <detail>" line per criterion and
// returns 0 when everything passed, 4 otherwise.
int report_acceptance(const std::vector<CriterionResult>& results);

// The built-in reference law: b = 2, single atom w = (0.25, 0.75),
// l = (0.5, 0.5).
GeneratorSpec reference_multinomial_spec();

}  // namespace cascade
