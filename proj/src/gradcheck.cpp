// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "objective.hpp"
#include "rng.hpp"

namespace dualmc {

namespace {

constexpr double kStep = 1e-5;
constexpr double kKinkMargin = 1e-3;

Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale) {
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = scale * rng.normal();
  return out;
}

ModelState random_state(Rng& rng, Index m, Index n, Index rank,
                        int hidden_layers, Activation activation) {
  auto widths = [&](Index out_dim) {
    std::vector<Index> dims;
    dims.push_back(rank);
    for (int l = 0; l < hidden_layers; ++l)
      dims.push_back(2 + static_cast<Index>(rng.below(5)));
    dims.push_back(out_dim);
    return dims;
  };
  ModelState state;
  state.col_net = init_branch(widths(m), activation, rng.next());
  state.row_net = init_branch(widths(n), activation, rng.next());
  // Nonzero biases and inputs so every gradient path is exercised.
  for (auto& b : state.col_net.biases)
    for (Index i = 0; i < b.size(); ++i) b(i) = 0.2 * rng.normal();
  for (auto& b : state.row_net.biases)
    for (Index i = 0; i < b.size(); ++i) b(i) = 0.2 * rng.normal();
  state.v = random_matrix(rng, rank, n, 0.7);
  state.u = random_matrix(rng, m, rank, 0.7);
  return state;
}

ObservedMatrix random_observed(Rng& rng, Index m, Index n) {
  Matrix values = random_matrix(rng, m, n, 1.0);
  Matrix indicator(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      indicator(i, j) = rng.uniform01() < 0.7 ? 1.0 : 0.0;
  indicator(0, 0) = 1.0;  // never fully unobserved
  return build_observed(values.cwiseProduct(indicator), indicator);
}

double min_abs_preactivation(const BranchNetwork& net, const Matrix& input) {
  DualForward fwd = forward_dual(net, input, PathMode::both);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& z : fwd.cache.pre_activations)
    lo = std::min(lo, z.cwiseAbs().minCoeff());
  return lo;
}

}  // namespace

GradCheckReport run_gradcheck(std::uint64_t seed, int instances) {
  require(instances >= 1, ErrorCode::invalid_argument,
          "gradcheck needs at least one instance");
  Rng rng(derive_seed(seed, stream::gradcheck));
  const Activation acts[] = {Activation::sigmoid, Activation::tanh,
                             Activation::relu};
  GradCheckReport report;

  for (int inst = 0; inst < instances; ++inst) {
    const Activation activation = acts[inst % 3];
    const int hidden_layers = inst % 3;

    ModelState state;
    ObservedMatrix y;
    for (int attempt = 0;; ++attempt) {
      const Index m = 4 + static_cast<Index>(rng.below(9));
      const Index n = 4 + static_cast<Index>(rng.below(9));
      const Index rank = 1 + static_cast<Index>(rng.below(3));
      state = random_state(rng, m, n, rank, hidden_layers, activation);
      y = random_observed(rng, m, n);
      if (activation != Activation::relu) break;
      // A kink too close to zero would corrupt the finite differences.
      const double lo =
          std::min(min_abs_preactivation(state.col_net, state.v),
                   min_abs_preactivation(state.row_net,
                                         state.u.transpose()));
      if (lo > kKinkMargin) break;
      require(attempt < 200, ErrorCode::numeric,
              "could not sample a relu instance away from kinks");
    }

    Hyperparameters hp;
    hp.alpha = 1.0;
    hp.beta = 1.0;
    hp.gamma = 0.01 + 0.99 * rng.uniform01();
    hp.lambda = 0.01 + 0.49 * rng.uniform01();

    const std::vector<double> analytic =
        flatten_bundle(total_loss(state, y, hp).grads);
    std::vector<double> flat = flatten_state(state);
    ModelState probe = state;

    double worst = 0.0;
    for (std::size_t p = 0; p < flat.size(); ++p) {
      const double saved = flat[p];
      flat[p] = saved + kStep;
      unflatten_state(probe, flat);
      const double plus = total_loss_value(probe, y, hp);
      flat[p] = saved - kStep;
      unflatten_state(probe, flat);
      const double minus = total_loss_value(probe, y, hp);
      flat[p] = saved;
      const double numeric = (plus - minus) / (2.0 * kStep);
      const double rel = std::abs(analytic[p] - numeric) /
                         std::max(std::abs(analytic[p]) + std::abs(numeric),
                                  1e-4);
      worst = std::max(worst, rel);
    }

    GradCheckCase entry;
    entry.description = std::string(activation_name(activation)) + " depth " +
                        std::to_string(hidden_layers) + " " +
                        std::to_string(y.rows()) + "x" +
                        std::to_string(y.cols());
    entry.params = flat.size();
    entry.max_rel_err = worst;
    report.cases.push_back(entry);
    report.max_rel_err = std::max(report.max_rel_err, worst);
  }
  return report;
}

}  // namespace dualmc
