// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "branch.hpp"
#include "observed.hpp"

namespace dualmc {

/// Trade-off weights for the four objective terms: column loss, row loss,
/// auxiliary factorization loss, weight/input decay. A zero coefficient
/// switches its term off entirely.
struct Hyperparameters {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.01;
  double lambda = 0.01;

  void validate() const;
};

/// Full trainable state: the two branches plus their free latent inputs.
/// col_net maps rank -> m and consumes V (rank x n) column-wise; row_net
/// maps rank -> n and consumes U^T (rank x m).
struct ModelState {
  BranchNetwork col_net;
  BranchNetwork row_net;
  Matrix v;  // rank x n
  Matrix u;  // m x rank
  PathMode path_mode = PathMode::both;

  Index rank() const { return col_net.input_dim(); }
  void validate() const;
};

/// Gradients for every trainable in ModelState, same shapes.
struct GradientBundle {
  std::vector<Matrix> col_weights;
  std::vector<Vector> col_biases;
  std::vector<Matrix> row_weights;
  std::vector<Vector> row_biases;
  Matrix v;
  Matrix u;

  static GradientBundle zeros_like(const ModelState& state);
};

struct ColumnLoss {
  double value = 0.0;
  BranchGradients grads;  // grads.input is dLoss/dV
};
/// (1/2n) || I . (Y - (nonlinear + linear)) ||_F^2 with the branch consuming
/// V column-wise.
ColumnLoss loss_column(const ModelState& state, const ObservedMatrix& y);

struct RowLoss {
  double value = 0.0;
  BranchGradients grads;  // grads.input is dLoss/dU^T
};
/// Mirror of loss_column on Y^T with divisor 1/2m, consuming U^T.
RowLoss loss_row(const ModelState& state, const ObservedMatrix& y);

struct ManifoldLoss {
  double value = 0.0;
  ManifoldGradients grads;
};
/// (1/2n) || I . (Y - Pc * Pr^T) ||_F^2 over the two branches' weight
/// products. V and U take no gradient from this term.
ManifoldLoss loss_manifold(const ModelState& state, const ObservedMatrix& y);

struct DecayLoss {
  double value = 0.0;
  GradientBundle grads;
};
/// (1/2n)||V||^2 + (1/2m)||U||^2 + (1/2) sum ||Wc||^2 + (1/2) sum ||Wr||^2,
/// biases excluded.
DecayLoss loss_decay(const ModelState& state);

struct TotalLoss {
  double value = 0.0;
  GradientBundle grads;
};
/// alpha * column + beta * row + gamma * manifold + lambda * decay. Terms
/// with a zero coefficient are skipped entirely.
TotalLoss total_loss(const ModelState& state, const ObservedMatrix& y,
                     const Hyperparameters& hp);

/// Value-only evaluation (used by finite differencing and step acceptance).
double total_loss_value(const ModelState& state, const ObservedMatrix& y,
                        const Hyperparameters& hp);

// Flattened views over the trainables, fixed order: col weights, col biases,
// row weights, row biases, V, U (Eigen-internal element order per block).
std::size_t trainable_count(const ModelState& state);
std::vector<double> flatten_state(const ModelState& state);
void unflatten_state(ModelState& state, const std::vector<double>& flat);
std::vector<double> flatten_bundle(const GradientBundle& bundle);

}  // namespace dualmc
