// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "objective.hpp"
#include "rprop.hpp"

namespace dualmc {

enum class PredictionMode { column, row, average };
PredictionMode prediction_from_string(const std::string& name);
const char* prediction_name(PredictionMode mode);

struct EarlyStopConfig {
  bool enabled = false;
  double fraction = 0.05;
  int patience = 50;
  double min_delta = 1e-5;
  // When false the validation split is still carved out and tracked (and
  // patience can still halt the loop) but fit returns the final state
  // instead of the best-on-validation snapshot: monitoring without model
  // selection.
  bool select_best = true;
};

struct ModelConfig {
  Index rank = 10;
  std::vector<Index> col_hidden;  // widths between rank and m
  std::vector<Index> row_hidden;  // widths between rank and n
  Activation activation = Activation::sigmoid;
  Hyperparameters hp;
  RpropConfig rprop;
  int max_iters = 1000;
  EarlyStopConfig early_stop;
  PredictionMode prediction = PredictionMode::column;
  bool disable_linear_path = false;
  bool disable_nonlinear_path = false;
  bool clamp_observed = true;
  std::uint64_t seed = 0;
};

/// Target interval the observed values are scaled into before training,
/// chosen to sit inside the activation's useful range.
std::pair<double, double> scale_target(Activation activation);

struct FitResult {
  ModelState state;
  ScalingRecord scaling;
  std::vector<double> loss_history;
  std::vector<double> val_history;  // empty unless early stopping is on
  int iterations_run = 0;
  // Per-entry squared error of the returned state, in scaled units, over the
  // training entries and over the validation entries (NaN without a split).
  double train_metric = 0.0;
  double holdout_metric = 0.0;
  std::vector<std::string> warnings;
};

/// Scale, initialize (V = U = 0, fan-scaled branch weights), then run the
/// full-batch loss/iRprop+ loop. With early stopping on, a seeded slice of
/// observed entries is held out, the per-entry squared error on it is
/// tracked each iteration, and the best-scoring state is returned.
FitResult fit(const ObservedMatrix& y, const ModelConfig& cfg);

/// Reconstruction in scaled units: the column branch's output, the row
/// branch's output transposed, or their mean.
Matrix predict(const ModelState& state, PredictionMode mode);

struct CompletionResult {
  Matrix completed;    // original units, observed entries clamped if asked
  Matrix column_recon; // original units, unclamped
  Matrix row_recon;    // original units, unclamped
  std::vector<double> loss_history;
  std::vector<double> val_history;
  int iterations_run = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// fit + predict + undo scaling (+ clamp observed positions to their exact
/// input values when cfg.clamp_observed is set).
CompletionResult complete(const ObservedMatrix& y, const ModelConfig& cfg);

/// Per-iteration history as CSV: iteration,total_loss,holdout_metric (the
/// third column is left empty when no validation split was used).
void write_history_csv(const std::string& path,
                       const std::vector<double>& loss_history,
                       const std::vector<double>& val_history);

}  // namespace dualmc
