// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "rprop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace dualmc {

void RpropConfig::validate() const {
  require(std::isfinite(eta_plus) && eta_plus > 1.0,
          ErrorCode::invalid_argument, "eta_plus must be > 1");
  require(std::isfinite(eta_minus) && eta_minus > 0.0 && eta_minus < 1.0,
          ErrorCode::invalid_argument, "eta_minus must be in (0, 1)");
  require(std::isfinite(delta_min) && delta_min > 0.0,
          ErrorCode::invalid_argument, "delta_min must be > 0");
  require(std::isfinite(delta_init) && delta_init >= delta_min,
          ErrorCode::invalid_argument, "delta_init must be >= delta_min");
  require(std::isfinite(delta_max) && delta_max >= delta_init,
          ErrorCode::invalid_argument, "delta_max must be >= delta_init");
}

RpropState init_rprop(std::size_t count, const RpropConfig& cfg) {
  cfg.validate();
  RpropState state;
  state.prev_grad.assign(count, 0.0);
  state.delta.assign(count, cfg.delta_init);
  state.prev_update.assign(count, 0.0);
  state.prev_loss = std::numeric_limits<double>::infinity();
  return state;
}

namespace {

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

void rprop_step(std::span<double> params, std::span<const double> grad,
                double loss_now, RpropState& state, const RpropConfig& cfg) {
  const std::size_t count = params.size();
  require(grad.size() == count && state.delta.size() == count,
          ErrorCode::shape_mismatch,
          "optimizer state, params and gradient sizes disagree");
  require(std::isfinite(loss_now), ErrorCode::numeric,
          "loss is not finite; optimizer cannot proceed");
  const bool worse = loss_now > state.prev_loss;

  for (std::size_t i = 0; i < count; ++i) {
    const double g = grad[i];
    require(std::isfinite(g), ErrorCode::numeric,
            "non-finite gradient at parameter " + std::to_string(i));
    const double s = state.prev_grad[i] * g;
    if (s > 0.0) {
      state.delta[i] = std::min(state.delta[i] * cfg.eta_plus, cfg.delta_max);
      const double update = -sign(g) * state.delta[i];
      params[i] += update;
      state.prev_update[i] = update;
      state.prev_grad[i] = g;
    } else if (s < 0.0) {
      state.delta[i] = std::max(state.delta[i] * cfg.eta_minus, cfg.delta_min);
      if (worse) params[i] -= state.prev_update[i];
      state.prev_update[i] = 0.0;
      state.prev_grad[i] = 0.0;
    } else {
      const double update = -sign(g) * state.delta[i];
      params[i] += update;
      state.prev_update[i] = update;
      state.prev_grad[i] = g;
    }
  }
  state.prev_loss = loss_now;
}

}  // namespace dualmc
