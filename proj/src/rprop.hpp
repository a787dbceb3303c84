// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dualmc {

struct RpropConfig {
  double eta_plus = 1.2;
  double eta_minus = 0.5;
  double delta_init = 0.1;
  double delta_min = 1e-6;
  double delta_max = 50.0;

  void validate() const;
};

/// Per-parameter optimizer state. prev_loss starts at +infinity so the first
/// step can never trigger a revert.
struct RpropState {
  std::vector<double> prev_grad;
  std::vector<double> delta;
  std::vector<double> prev_update;
  double prev_loss = 0.0;
};

RpropState init_rprop(std::size_t count, const RpropConfig& cfg);

/// One iRprop+ update, in place. Sign agreement with the previous gradient
/// grows the step, disagreement shrinks it and reverts the previous update
/// only if the loss got worse (then the stored gradient is cleared so the
/// next step is treated as fresh). loss_now is the objective evaluated at
/// the current params, before this step.
void rprop_step(std::span<double> params, std::span<const double> grad,
                double loss_now, RpropState& state, const RpropConfig& cfg);

}  // namespace dualmc
