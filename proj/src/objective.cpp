// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "objective.hpp"

#include <cmath>
#include <cstring>

#include "error.hpp"

namespace dualmc {

void Hyperparameters::validate() const {
  require(std::isfinite(alpha) && alpha >= 0.0, ErrorCode::invalid_argument,
          "alpha must be finite and non-negative");
  require(std::isfinite(beta) && beta >= 0.0, ErrorCode::invalid_argument,
          "beta must be finite and non-negative");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::invalid_argument,
          "gamma must be finite and non-negative");
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorCode::invalid_argument,
          "lambda must be finite and non-negative");
}

void ModelState::validate() const {
  require(col_net.layer_count() > 0 && row_net.layer_count() > 0,
          ErrorCode::invalid_argument, "both branches need at least one layer");
  require(col_net.input_dim() == row_net.input_dim(),
          ErrorCode::shape_mismatch,
          "column and row branches disagree on rank");
  require(v.rows() == rank(), ErrorCode::shape_mismatch,
          "V must have rank rows");
  require(u.cols() == rank(), ErrorCode::shape_mismatch,
          "U must have rank columns");
  require(col_net.output_dim() == u.rows(), ErrorCode::shape_mismatch,
          "column branch output dim must match U rows (m)");
  require(row_net.output_dim() == v.cols(), ErrorCode::shape_mismatch,
          "row branch output dim must match V columns (n)");
}

GradientBundle GradientBundle::zeros_like(const ModelState& state) {
  GradientBundle g;
  for (const auto& w : state.col_net.weights)
    g.col_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : state.col_net.biases)
    g.col_biases.push_back(Vector::Zero(b.size()));
  for (const auto& w : state.row_net.weights)
    g.row_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : state.row_net.biases)
    g.row_biases.push_back(Vector::Zero(b.size()));
  g.v = Matrix::Zero(state.v.rows(), state.v.cols());
  g.u = Matrix::Zero(state.u.rows(), state.u.cols());
  return g;
}

namespace {

void check_observed(const ModelState& state, const ObservedMatrix& y) {
  require(y.rows() == state.col_net.output_dim(), ErrorCode::shape_mismatch,
          "observed matrix rows must match column branch output");
  require(y.cols() == state.row_net.output_dim(), ErrorCode::shape_mismatch,
          "observed matrix cols must match row branch output");
}

}  // namespace

ColumnLoss loss_column(const ModelState& state, const ObservedMatrix& y) {
  check_observed(state, y);
  const double n = static_cast<double>(y.cols());
  DualForward fwd = forward_dual(state.col_net, state.v, state.path_mode);
  Matrix recon = fwd.nonlinear_out + fwd.linear_out;
  Matrix residual = y.indicator.cwiseProduct(recon - y.values);
  ColumnLoss out;
  out.value = residual.squaredNorm() / (2.0 * n);
  out.grads = backward_dual(state.col_net, fwd.cache, residual / n);
  return out;
}

RowLoss loss_row(const ModelState& state, const ObservedMatrix& y) {
  check_observed(state, y);
  const double m = static_cast<double>(y.rows());
  DualForward fwd =
      forward_dual(state.row_net, state.u.transpose(), state.path_mode);
  Matrix recon = fwd.nonlinear_out + fwd.linear_out;  // n x m
  Matrix residual = y.indicator.transpose().cwiseProduct(
      recon - y.values.transpose());
  RowLoss out;
  out.value = residual.squaredNorm() / (2.0 * m);
  out.grads = backward_dual(state.row_net, fwd.cache, residual / m);
  return out;
}

ManifoldLoss loss_manifold(const ModelState& state, const ObservedMatrix& y) {
  check_observed(state, y);
  const double n = static_cast<double>(y.cols());
  Matrix pc = weight_product(state.col_net);  // m x rank
  Matrix pr = weight_product(state.row_net);  // n x rank
  Matrix residual = y.indicator.cwiseProduct(pc * pr.transpose() - y.values);
  ManifoldLoss out;
  out.value = residual.squaredNorm() / (2.0 * n);
  out.grads = manifold_gradients(state.col_net, state.row_net, residual / n);
  return out;
}

DecayLoss loss_decay(const ModelState& state) {
  const double n = static_cast<double>(state.v.cols());
  const double m = static_cast<double>(state.u.rows());
  DecayLoss out;
  out.grads = GradientBundle::zeros_like(state);
  out.value = state.v.squaredNorm() / (2.0 * n) +
              state.u.squaredNorm() / (2.0 * m);
  for (std::size_t l = 0; l < state.col_net.layer_count(); ++l) {
    out.value += 0.5 * state.col_net.weights[l].squaredNorm();
    out.grads.col_weights[l] = state.col_net.weights[l];
  }
  for (std::size_t l = 0; l < state.row_net.layer_count(); ++l) {
    out.value += 0.5 * state.row_net.weights[l].squaredNorm();
    out.grads.row_weights[l] = state.row_net.weights[l];
  }
  out.grads.v = state.v / n;
  out.grads.u = state.u / m;
  return out;
}

TotalLoss total_loss(const ModelState& state, const ObservedMatrix& y,
                     const Hyperparameters& hp) {
  state.validate();
  hp.validate();
  TotalLoss out;
  out.grads = GradientBundle::zeros_like(state);

  if (hp.alpha > 0.0) {
    ColumnLoss cl = loss_column(state, y);
    out.value += hp.alpha * cl.value;
    for (std::size_t l = 0; l < cl.grads.weights.size(); ++l) {
      out.grads.col_weights[l] += hp.alpha * cl.grads.weights[l];
      out.grads.col_biases[l] += hp.alpha * cl.grads.biases[l];
    }
    out.grads.v += hp.alpha * cl.grads.input;
  }
  if (hp.beta > 0.0) {
    RowLoss rl = loss_row(state, y);
    out.value += hp.beta * rl.value;
    for (std::size_t l = 0; l < rl.grads.weights.size(); ++l) {
      out.grads.row_weights[l] += hp.beta * rl.grads.weights[l];
      out.grads.row_biases[l] += hp.beta * rl.grads.biases[l];
    }
    out.grads.u += hp.beta * rl.grads.input.transpose();
  }
  if (hp.gamma > 0.0) {
    ManifoldLoss ml = loss_manifold(state, y);
    out.value += hp.gamma * ml.value;
    for (std::size_t l = 0; l < ml.grads.col_weights.size(); ++l)
      out.grads.col_weights[l] += hp.gamma * ml.grads.col_weights[l];
    for (std::size_t l = 0; l < ml.grads.row_weights.size(); ++l)
      out.grads.row_weights[l] += hp.gamma * ml.grads.row_weights[l];
  }
  if (hp.lambda > 0.0) {
    DecayLoss dl = loss_decay(state);
    out.value += hp.lambda * dl.value;
    for (std::size_t l = 0; l < dl.grads.col_weights.size(); ++l)
      out.grads.col_weights[l] += hp.lambda * dl.grads.col_weights[l];
    for (std::size_t l = 0; l < dl.grads.row_weights.size(); ++l)
      out.grads.row_weights[l] += hp.lambda * dl.grads.row_weights[l];
    out.grads.v += hp.lambda * dl.grads.v;
    out.grads.u += hp.lambda * dl.grads.u;
  }
  return out;
}

double total_loss_value(const ModelState& state, const ObservedMatrix& y,
                        const Hyperparameters& hp) {
  state.validate();
  hp.validate();
  double value = 0.0;
  if (hp.alpha > 0.0) {
    const double n = static_cast<double>(y.cols());
    DualForward fwd = forward_dual(state.col_net, state.v, state.path_mode);
    Matrix residual = y.indicator.cwiseProduct(
        fwd.nonlinear_out + fwd.linear_out - y.values);
    value += hp.alpha * residual.squaredNorm() / (2.0 * n);
  }
  if (hp.beta > 0.0) {
    const double m = static_cast<double>(y.rows());
    DualForward fwd =
        forward_dual(state.row_net, state.u.transpose(), state.path_mode);
    Matrix residual = y.indicator.transpose().cwiseProduct(
        fwd.nonlinear_out + fwd.linear_out - y.values.transpose());
    value += hp.beta * residual.squaredNorm() / (2.0 * m);
  }
  if (hp.gamma > 0.0) {
    const double n = static_cast<double>(y.cols());
    Matrix recon = weight_product(state.col_net) *
                   weight_product(state.row_net).transpose();
    Matrix residual = y.indicator.cwiseProduct(recon - y.values);
    value += hp.gamma * residual.squaredNorm() / (2.0 * n);
  }
  if (hp.lambda > 0.0) {
    double decay = state.v.squaredNorm() / (2.0 * state.v.cols()) +
                   state.u.squaredNorm() / (2.0 * state.u.rows());
    for (const auto& w : state.col_net.weights)
      decay += 0.5 * w.squaredNorm();
    for (const auto& w : state.row_net.weights)
      decay += 0.5 * w.squaredNorm();
    value += hp.lambda * decay;
  }
  return value;
}

namespace {

template <typename Fn>
void for_each_block(const ModelState& state, Fn&& fn) {
  for (const auto& w : state.col_net.weights) fn(w.data(), w.size());
  for (const auto& b : state.col_net.biases) fn(b.data(), b.size());
  for (const auto& w : state.row_net.weights) fn(w.data(), w.size());
  for (const auto& b : state.row_net.biases) fn(b.data(), b.size());
  fn(state.v.data(), state.v.size());
  fn(state.u.data(), state.u.size());
}

template <typename Fn>
void for_each_block_mut(ModelState& state, Fn&& fn) {
  for (auto& w : state.col_net.weights) fn(w.data(), w.size());
  for (auto& b : state.col_net.biases) fn(b.data(), b.size());
  for (auto& w : state.row_net.weights) fn(w.data(), w.size());
  for (auto& b : state.row_net.biases) fn(b.data(), b.size());
  fn(state.v.data(), state.v.size());
  fn(state.u.data(), state.u.size());
}

}  // namespace

std::size_t trainable_count(const ModelState& state) {
  std::size_t total = 0;
  for_each_block(state, [&](const double*, Index size) {
    total += static_cast<std::size_t>(size);
  });
  return total;
}

std::vector<double> flatten_state(const ModelState& state) {
  std::vector<double> flat;
  flat.reserve(trainable_count(state));
  for_each_block(state, [&](const double* data, Index size) {
    flat.insert(flat.end(), data, data + size);
  });
  return flat;
}

void unflatten_state(ModelState& state, const std::vector<double>& flat) {
  require(flat.size() == trainable_count(state), ErrorCode::shape_mismatch,
          "flattened vector length does not match model trainables");
  std::size_t offset = 0;
  for_each_block_mut(state, [&](double* data, Index size) {
    std::memcpy(data, flat.data() + offset,
                static_cast<std::size_t>(size) * sizeof(double));
    offset += static_cast<std::size_t>(size);
  });
}

std::vector<double> flatten_bundle(const GradientBundle& bundle) {
  std::vector<double> flat;
  auto append = [&](const double* data, Index size) {
    flat.insert(flat.end(), data, data + size);
  };
  for (const auto& w : bundle.col_weights) append(w.data(), w.size());
  for (const auto& b : bundle.col_biases) append(b.data(), b.size());
  for (const auto& w : bundle.row_weights) append(w.data(), w.size());
  for (const auto& b : bundle.row_biases) append(b.data(), b.size());
  append(bundle.v.data(), bundle.v.size());
  append(bundle.u.data(), bundle.u.size());
  return flat;
}

}  // namespace dualmc
