// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "matrix_types.hpp"

namespace dualmc {

/// 10 log10( m n peak^2 / ||hat - true||_F^2 ), peak = max entry of y_true.
/// Identical inputs give +infinity.
double psnr(const Matrix& y_true, const Matrix& y_hat);

/// PSNR restricted to positions where mask is 1: the entry count replaces
/// m*n and the error sum runs over masked positions only. The peak is still
/// taken over the full y_true so full and masked scores share a reference.
double psnr_masked(const Matrix& y_true, const Matrix& y_hat,
                   const Matrix& mask);

/// Global (whole-matrix) structural similarity with population moments and
/// the conventional constants C1=(0.01 D)^2, C2=(0.03 D)^2 where D is the
/// dynamic range of y_true.
double ssim(const Matrix& y_true, const Matrix& y_hat);

/// ssim over the masked entries only.
double ssim_masked(const Matrix& y_true, const Matrix& y_hat,
                   const Matrix& mask);

/// Mean absolute error over hidden positions, normalized by the declared
/// value range: sum |hat - true| / ((y_max - y_min) * count).
double nmae(const Matrix& y_true, const Matrix& y_hat,
            const Matrix& hidden_mask, double y_min, double y_max);

}  // namespace dualmc
