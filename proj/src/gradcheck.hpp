// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dualmc {

struct GradCheckCase {
  std::string description;
  std::size_t params = 0;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double max_rel_err = 0.0;
};

/// Compares every analytic gradient of the full objective against central
/// finite differences (step 1e-5) on randomized small instances covering
/// all activations and depths 0..2. ReLU instances are redrawn until no
/// pre-activation sits within 1e-3 of the kink. The relative error uses
/// |a - n| / max(|a| + |n|, 1e-4).
GradCheckReport run_gradcheck(std::uint64_t seed, int instances);

}  // namespace dualmc
