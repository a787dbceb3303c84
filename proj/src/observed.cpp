// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "observed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "error.hpp"
#include "pnm_io.hpp"
#include "rng.hpp"

namespace dualmc {

ObservedMatrix build_observed(const Matrix& values, const Matrix& indicator) {
  require(values.rows() == indicator.rows() && values.cols() == indicator.cols(),
          ErrorCode::shape_mismatch,
          "build_observed: values and indicator shapes differ");
  require(values.rows() >= 1 && values.cols() >= 1, ErrorCode::invalid_argument,
          "build_observed: matrix must be at least 1x1");
  for (Index j = 0; j < indicator.cols(); ++j) {
    for (Index i = 0; i < indicator.rows(); ++i) {
      const double v = indicator(i, j);
      require(v == 0.0 || v == 1.0, ErrorCode::invalid_argument,
              "build_observed: indicator entries must be exactly 0 or 1");
    }
  }
  ObservedMatrix out;
  out.indicator = indicator;
  out.values = values.cwiseProduct(indicator);
  return out;
}

const char* MaskSpec::kind_name(Kind k) {
  switch (k) {
    case Kind::none: return "none";
    case Kind::random: return "random";
    case Kind::block: return "block";
    case Kind::image: return "image";
  }
  return "?";
}

Matrix generate_mask(Index rows, Index cols, const MaskSpec& spec) {
  require(rows >= 1 && cols >= 1, ErrorCode::invalid_argument,
          "generate_mask: shape must be at least 1x1");
  Matrix indicator = Matrix::Ones(rows, cols);
  switch (spec.kind) {
    case MaskSpec::Kind::none:
      break;
    case MaskSpec::Kind::random: {
      require(spec.fraction >= 0.0 && spec.fraction <= 1.0,
              ErrorCode::invalid_argument,
              "generate_mask: random fraction must lie in [0,1]");
      const auto total = static_cast<std::uint64_t>(rows) * cols;
      const auto hidden =
          static_cast<std::uint64_t>(std::llround(spec.fraction * static_cast<double>(total)));
      std::vector<std::uint64_t> idx(total);
      std::iota(idx.begin(), idx.end(), 0);
      Rng rng(spec.seed);
      for (std::uint64_t i = 0; i < hidden; ++i) {
        const std::uint64_t j = i + rng.below(total - i);
        std::swap(idx[i], idx[j]);
        const auto flat = idx[i];
        indicator(static_cast<Index>(flat / cols), static_cast<Index>(flat % cols)) = 0.0;
      }
      break;
    }
    case MaskSpec::Kind::block: {
      require(spec.top >= 0 && spec.left >= 0 && spec.height >= 0 && spec.width >= 0 &&
                  spec.top + spec.height <= rows && spec.left + spec.width <= cols,
              ErrorCode::invalid_argument,
              "generate_mask: block rectangle out of bounds");
      indicator.block(spec.top, spec.left, spec.height, spec.width).setZero();
      break;
    }
    case MaskSpec::Kind::image: {
      const Matrix img = load_pgm(spec.image_path);
      require(img.rows() == rows && img.cols() == cols, ErrorCode::shape_mismatch,
              "generate_mask: mask image shape does not match the matrix");
      for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
          if (img(i, j) != 0.0) indicator(i, j) = 0.0;
      break;
    }
  }
  return indicator;
}

std::pair<ObservedMatrix, ScalingRecord> scale_to_range(const ObservedMatrix& x,
                                                        double lo, double hi) {
  require(hi > lo, ErrorCode::invalid_argument, "scale_to_range: need hi > lo");
  require(x.observed_count() > 0, ErrorCode::invalid_argument,
          "scale_to_range: no observed entries");

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (x.indicator(i, j) == 1.0) {
        vmin = std::min(vmin, x.values(i, j));
        vmax = std::max(vmax, x.values(i, j));
      }
    }
  }

  ScalingRecord rec;
  rec.original_min = vmin;
  rec.original_max = vmax;
  if (vmax == vmin) {
    rec.degenerate = true;
    rec.gain = 1.0;
    rec.offset = vmin - 0.5 * (lo + hi);
  } else {
    rec.gain = (vmax - vmin) / (hi - lo);
    rec.offset = vmin - lo * rec.gain;
  }

  ObservedMatrix out;
  out.indicator = x.indicator;
  out.values = ((x.values.array() - rec.offset) / rec.gain).matrix().cwiseProduct(x.indicator);
  out.scaling = rec;
  return {std::move(out), rec};
}

Matrix unscale(const Matrix& scaled, const ScalingRecord& record) {
  return (scaled.array() * record.gain + record.offset).matrix();
}

HoldoutSplit split_holdout(const ObservedMatrix& x, double fraction,
                           std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, ErrorCode::invalid_argument,
          "split_holdout: fraction must lie in (0,1)");

  std::vector<std::pair<Index, Index>> observed;
  observed.reserve(x.observed_count());
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i)
      if (x.indicator(i, j) == 1.0) observed.emplace_back(i, j);
  require(!observed.empty(), ErrorCode::invalid_argument,
          "split_holdout: no observed entries");

  const auto holdout_count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(observed.size())));

  Rng rng(seed);
  HoldoutSplit split;
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (std::size_t i = 0; i < holdout_count; ++i) {
      const std::size_t j = i + rng.below(observed.size() - i);
      std::swap(observed[i], observed[j]);
    }
    Matrix train_ind = x.indicator;
    for (std::size_t i = 0; i < holdout_count; ++i)
      train_ind(observed[i].first, observed[i].second) = 0.0;

    // Rows/columns that were covered must stay covered in train.
    bool covered = true;
    for (Index i = 0; i < x.rows() && covered; ++i)
      if (x.indicator.row(i).sum() > 0.0 && train_ind.row(i).sum() == 0.0) covered = false;
    for (Index j = 0; j < x.cols() && covered; ++j)
      if (x.indicator.col(j).sum() > 0.0 && train_ind.col(j).sum() == 0.0) covered = false;

    if (covered || attempt == 99) {
      split.coverage_warning = !covered;
      split.train.indicator = train_ind;
      split.train.values = x.values.cwiseProduct(train_ind);
      split.holdout.indicator = x.indicator - train_ind;
      split.holdout.values = x.values.cwiseProduct(split.holdout.indicator);
      return split;
    }
  }
  return split;  // unreachable
}

}  // namespace dualmc
