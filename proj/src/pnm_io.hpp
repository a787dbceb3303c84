// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "matrix_types.hpp"

namespace dualmc {

// 8-bit binary netpbm only: PGM (P5) grayscale, PPM (P6) color.

struct RgbImage {
  Matrix r, g, b;
  Index rows() const { return r.rows(); }
  Index cols() const { return r.cols(); }
};

Matrix load_pgm(const std::string& path);
void save_pgm(const Matrix& pixels, const std::string& path);

RgbImage load_ppm(const std::string& path);
void save_ppm(const RgbImage& image, const std::string& path);

/// [R | G | B] horizontal concatenation, m x 3n.
Matrix unfold_rgb(const RgbImage& image);
RgbImage refold_rgb(const Matrix& unfolded);

/// Stacks every *.pgm in a directory (lexicographic filename order) into one
/// matrix, one image per column, pixels flattened in reading order. All
/// images must share the same dimensions.
Matrix stack_pgm_directory(const std::string& dir);

}  // namespace dualmc
