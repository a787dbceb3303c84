// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "csv_io.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace dualmc {

PredictionMode prediction_from_string(const std::string& name) {
  if (name == "column") return PredictionMode::column;
  if (name == "row") return PredictionMode::row;
  if (name == "average") return PredictionMode::average;
  throw Error(ErrorCode::invalid_argument,
              "unknown prediction mode: " + name +
                  " (expected column, row or average)");
}

const char* prediction_name(PredictionMode mode) {
  switch (mode) {
    case PredictionMode::column: return "column";
    case PredictionMode::row: return "row";
    case PredictionMode::average: return "average";
  }
  return "column";
}

std::pair<double, double> scale_target(Activation activation) {
  switch (activation) {
    case Activation::sigmoid: return {0.1, 0.9};
    case Activation::tanh: return {-0.85, 0.85};
    case Activation::relu: return {0.1, 0.9};
  }
  return {0.1, 0.9};
}

namespace {

std::vector<Index> assemble_dims(Index rank, const std::vector<Index>& hidden,
                                 Index out) {
  std::vector<Index> dims;
  dims.push_back(rank);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

PathMode path_mode_from(const ModelConfig& cfg) {
  require(!(cfg.disable_linear_path && cfg.disable_nonlinear_path),
          ErrorCode::invalid_argument,
          "cannot disable both the linear and the nonlinear path");
  if (cfg.disable_linear_path) return PathMode::nonlinear_only;
  if (cfg.disable_nonlinear_path) return PathMode::linear_only;
  return PathMode::both;
}

void validate_config(const ObservedMatrix& y, const ModelConfig& cfg,
                     std::vector<std::string>& warnings) {
  cfg.hp.validate();
  cfg.rprop.validate();
  require(cfg.max_iters >= 0, ErrorCode::invalid_argument,
          "max_iters must be non-negative");
  require(y.observed_count() > 0, ErrorCode::invalid_argument,
          "no observed entries to train on");
  require(cfg.rank >= 1, ErrorCode::invalid_argument, "rank must be >= 1");
  require(cfg.rank < std::min(y.rows(), y.cols()),
          ErrorCode::invalid_argument, "rank must be below min(m, n)");
  for (Index d : cfg.col_hidden)
    require(d >= 1, ErrorCode::invalid_argument,
            "column hidden widths must be >= 1");
  for (Index d : cfg.row_hidden)
    require(d >= 1, ErrorCode::invalid_argument,
            "row hidden widths must be >= 1");
  if (cfg.early_stop.enabled) {
    require(cfg.early_stop.fraction > 0.0 && cfg.early_stop.fraction < 1.0,
            ErrorCode::invalid_argument,
            "early_stop.fraction must be in (0, 1)");
    require(cfg.early_stop.patience >= 1, ErrorCode::invalid_argument,
            "early_stop.patience must be >= 1");
    require(cfg.early_stop.min_delta >= 0.0, ErrorCode::invalid_argument,
            "early_stop.min_delta must be >= 0");
  }

  Index min_row_obs = y.cols();
  Index min_col_obs = y.rows();
  for (Index i = 0; i < y.rows(); ++i) {
    const auto count = static_cast<Index>(y.indicator.row(i).sum());
    min_row_obs = std::min(min_row_obs, count);
  }
  for (Index j = 0; j < y.cols(); ++j) {
    const auto count = static_cast<Index>(y.indicator.col(j).sum());
    min_col_obs = std::min(min_col_obs, count);
  }
  if (cfg.rank >= std::min(min_row_obs, min_col_obs))
    warnings.push_back(
        "rank " + std::to_string(cfg.rank) +
        " is not below the smallest per-row/per-column observed count (" +
        std::to_string(std::min(min_row_obs, min_col_obs)) +
        "); recovery may be underdetermined");
}

double entry_mse(const ModelState& state, PredictionMode mode,
                 const ObservedMatrix& target) {
  const Matrix recon = predict(state, mode);
  const double count = target.indicator.sum();
  return target.indicator.cwiseProduct(recon - target.values).squaredNorm() /
         count;
}

}  // namespace

FitResult fit(const ObservedMatrix& y, const ModelConfig& cfg) {
  FitResult result;
  validate_config(y, cfg, result.warnings);

  const auto [lo, hi] = scale_target(cfg.activation);
  auto [scaled, record] = scale_to_range(y, lo, hi);
  result.scaling = record;
  if (record.degenerate)
    result.warnings.push_back(
        "observed values are constant; scaling maps them to the target "
        "midpoint");

  ObservedMatrix train = scaled;
  ObservedMatrix holdout;
  if (cfg.early_stop.enabled) {
    HoldoutSplit split = split_holdout(scaled, cfg.early_stop.fraction,
                                       derive_seed(cfg.seed, stream::holdout));
    require(split.holdout.observed_count() > 0, ErrorCode::invalid_argument,
            "validation fraction selects no entries; disable early stopping "
            "or raise the fraction");
    require(split.train.observed_count() > 0, ErrorCode::invalid_argument,
            "validation fraction leaves no training entries");
    if (split.coverage_warning)
      result.warnings.push_back(
          "validation split leaves some rows or columns without training "
          "entries");
    train = std::move(split.train);
    holdout = std::move(split.holdout);
  }

  ModelState state;
  state.col_net =
      init_branch(assemble_dims(cfg.rank, cfg.col_hidden, y.rows()),
                  cfg.activation, derive_seed(cfg.seed, stream::col_init));
  state.row_net =
      init_branch(assemble_dims(cfg.rank, cfg.row_hidden, y.cols()),
                  cfg.activation, derive_seed(cfg.seed, stream::row_init));
  state.v = Matrix::Zero(cfg.rank, y.cols());
  state.u = Matrix::Zero(y.rows(), cfg.rank);
  state.path_mode = path_mode_from(cfg);
  state.validate();

  RpropState opt = init_rprop(trainable_count(state), cfg.rprop);
  double initial_loss = 0.0;
  double best_metric = std::numeric_limits<double>::infinity();
  ModelState best_state = state;
  int since_improvement = 0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    TotalLoss tl = total_loss(state, train, cfg.hp);
    require(std::isfinite(tl.value), ErrorCode::numeric,
            "loss became non-finite at iteration " + std::to_string(it));
    if (it == 0)
      initial_loss = tl.value;
    else
      require(tl.value <= 1e6 * initial_loss, ErrorCode::numeric,
              "training diverged at iteration " + std::to_string(it));
    result.loss_history.push_back(tl.value);

    std::vector<double> params = flatten_state(state);
    std::vector<double> grads = flatten_bundle(tl.grads);
    rprop_step(params, grads, tl.value, opt, cfg.rprop);
    unflatten_state(state, params);
    result.iterations_run = it + 1;

    if (cfg.early_stop.enabled) {
      const double metric = entry_mse(state, cfg.prediction, holdout);
      result.val_history.push_back(metric);
      if (metric < best_metric - cfg.early_stop.min_delta) {
        best_metric = metric;
        best_state = state;
        since_improvement = 0;
      } else {
        ++since_improvement;
      }
      if (since_improvement >= cfg.early_stop.patience) break;
    }
  }

  result.state = cfg.early_stop.enabled && cfg.early_stop.select_best
                     ? std::move(best_state)
                     : std::move(state);
  result.train_metric = entry_mse(result.state, cfg.prediction, train);
  result.holdout_metric =
      cfg.early_stop.enabled
          ? entry_mse(result.state, cfg.prediction, holdout)
          : std::numeric_limits<double>::quiet_NaN();
  return result;
}

Matrix predict(const ModelState& state, PredictionMode mode) {
  switch (mode) {
    case PredictionMode::column: {
      DualForward fwd = forward_dual(state.col_net, state.v, state.path_mode);
      return fwd.nonlinear_out + fwd.linear_out;
    }
    case PredictionMode::row: {
      DualForward fwd =
          forward_dual(state.row_net, state.u.transpose(), state.path_mode);
      return (fwd.nonlinear_out + fwd.linear_out).transpose();
    }
    case PredictionMode::average:
      return 0.5 * (predict(state, PredictionMode::column) +
                    predict(state, PredictionMode::row));
  }
  throw Error(ErrorCode::invalid_argument, "invalid prediction mode");
}

CompletionResult complete(const ObservedMatrix& y, const ModelConfig& cfg) {
  FitResult fr = fit(y, cfg);
  CompletionResult out;
  out.column_recon = unscale(predict(fr.state, PredictionMode::column),
                             fr.scaling);
  out.row_recon = unscale(predict(fr.state, PredictionMode::row), fr.scaling);
  switch (cfg.prediction) {
    case PredictionMode::column: out.completed = out.column_recon; break;
    case PredictionMode::row: out.completed = out.row_recon; break;
    case PredictionMode::average:
      out.completed = 0.5 * (out.column_recon + out.row_recon);
      break;
  }
  if (cfg.clamp_observed)
    out.completed = y.indicator.cwiseProduct(y.values) +
                    (Matrix::Ones(y.rows(), y.cols()) - y.indicator)
                        .cwiseProduct(out.completed);
  out.loss_history = std::move(fr.loss_history);
  out.val_history = std::move(fr.val_history);
  out.iterations_run = fr.iterations_run;
  out.seed = cfg.seed;
  out.warnings = std::move(fr.warnings);
  return out;
}

void write_history_csv(const std::string& path,
                       const std::vector<double>& loss_history,
                       const std::vector<double>& val_history) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + path);
  out << "iteration,total_loss,holdout_metric\n";
  for (std::size_t i = 0; i < loss_history.size(); ++i) {
    out << i << ',' << format_double(loss_history[i]) << ',';
    if (i < val_history.size()) out << format_double(val_history[i]);
    out << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed: " + path);
}

}  // namespace dualmc
