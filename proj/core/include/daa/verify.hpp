#pragma once

// Self-checks run by `daa verify`: the odds-score identities, the ASFT/BCE
// decomposition, the ORPO/ASFT relation, beta = 1 recovery, finite-difference
// gradient checks for the scalar, tabular and scorer paths, and the ICC
// boundary cases.

#include <cstdint>
#include <string>
#include <vector>

namespace daa {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_verification(std::uint64_t seed = 20240601);

// |a - b| / max(|a|, |b|, floor). With a 1e-6 central-difference step the
// difference quotient carries ~1e-10 * |loss| of round-off, so components
// much smaller than 1e-3 are compared on an absolute scale instead.
double relative_error(double a, double b, double floor = 1e-3);

}  // namespace daa
