// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "matrix_types.hpp"

namespace dualmc {

/// Invertible affine range mapping. Forward map: scaled = (x - offset) / gain.
struct ScalingRecord {
  double offset = 0.0;
  double gain = 1.0;
  double original_min = 0.0;
  double original_max = 0.0;
  // All observed values were equal; they were mapped to the midpoint of the
  // target interval with gain 1.
  bool degenerate = false;
};

/// Partially observed dense matrix. Missing positions hold 0 in `values`;
/// `indicator` is 1 where observed, 0 where missing.
struct ObservedMatrix {
  Matrix values;
  Matrix indicator;
  std::optional<ScalingRecord> scaling;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  std::size_t observed_count() const {
    return static_cast<std::size_t>(indicator.sum() + 0.5);
  }
};

/// Validates shapes and the 0/1 indicator, zeroes values at missing
/// positions.
ObservedMatrix build_observed(const Matrix& values, const Matrix& indicator);

struct MaskSpec {
  enum class Kind { none, random, block, image };
  Kind kind = Kind::random;
  double fraction = 0.3;  // random: fraction of entries hidden
  Index top = 0, left = 0, height = 0, width = 0;  // block: hidden rectangle
  std::string image_path;  // image: PGM file, nonzero pixel = hidden
  std::uint64_t seed = 0;

  static const char* kind_name(Kind k);
};

/// Returns the indicator of OBSERVED entries for the given mask. For
/// random(f), exactly llround(f*m*n) entries are hidden, drawn uniformly
/// without replacement.
Matrix generate_mask(Index rows, Index cols, const MaskSpec& spec);

/// Affine map of observed entries so that min -> lo, max -> hi. Missing
/// positions stay 0. Constant observed values map to the midpoint with a
/// degenerate flag (warning, not failure).
std::pair<ObservedMatrix, ScalingRecord> scale_to_range(const ObservedMatrix& x,
                                                        double lo, double hi);

/// Elementwise inverse of scale_to_range's map.
Matrix unscale(const Matrix& scaled, const ScalingRecord& record);

struct HoldoutSplit {
  ObservedMatrix train;
  ObservedMatrix holdout;
  // Set when no draw within 100 attempts kept every covered row/column
  // covered in the train part.
  bool coverage_warning = false;
};

/// Partitions the observed set uniformly at random; holdout gets
/// llround(fraction * |observed|) entries. Re-draws up to 100 times so each
/// row and column that had an observed entry keeps one in train.
HoldoutSplit split_holdout(const ObservedMatrix& x, double fraction,
                           std::uint64_t seed);

}  // namespace dualmc
