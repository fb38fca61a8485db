#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kinlyap::cli {

// Knobs for mutation testing; the defaults run the pristine suite.
struct ValidationOptions {
  double q_asymmetry = 0.0;          // amplitude of random noise added to Q
  bool drop_incoming_shift = false;  // remove exp(-|lambda| dx) from incoming B weights
  std::uint64_t seed = 0x6b696e6c;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Invariant suite on the coplanar model: decomposition residuals, the
// Lyapunov sandwich, the advection max principle, collision conservation,
// implicit contraction, per-step decay and the two boundary-term formulas.
std::vector<CheckResult> cmd_validate(const ValidationOptions& options = {});

}  // namespace kinlyap::cli
