// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "metrics.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace dualmc {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          ErrorCode::shape_mismatch, "metric inputs must have equal shape");
}

void check_mask(const Matrix& y, const Matrix& mask) {
  check_same_shape(y, mask);
  for (Index j = 0; j < mask.cols(); ++j)
    for (Index i = 0; i < mask.rows(); ++i)
      require(mask(i, j) == 0.0 || mask(i, j) == 1.0,
              ErrorCode::invalid_argument, "mask entries must be 0 or 1");
}

double psnr_from(double count, double peak, double err_sq) {
  if (err_sq == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(count * peak * peak / err_sq);
}

struct Moments {
  double mean_t = 0.0;
  double mean_h = 0.0;
  double var_t = 0.0;
  double var_h = 0.0;
  double cov = 0.0;
};

// Population (divide-by-N) statistics over the selected entries.
Moments moments_over(const Matrix& y_true, const Matrix& y_hat,
                     const Matrix* mask, double count) {
  Moments mo;
  for (Index j = 0; j < y_true.cols(); ++j)
    for (Index i = 0; i < y_true.rows(); ++i) {
      if (mask && (*mask)(i, j) == 0.0) continue;
      mo.mean_t += y_true(i, j);
      mo.mean_h += y_hat(i, j);
    }
  mo.mean_t /= count;
  mo.mean_h /= count;
  for (Index j = 0; j < y_true.cols(); ++j)
    for (Index i = 0; i < y_true.rows(); ++i) {
      if (mask && (*mask)(i, j) == 0.0) continue;
      const double dt = y_true(i, j) - mo.mean_t;
      const double dh = y_hat(i, j) - mo.mean_h;
      mo.var_t += dt * dt;
      mo.var_h += dh * dh;
      mo.cov += dt * dh;
    }
  mo.var_t /= count;
  mo.var_h /= count;
  mo.cov /= count;
  return mo;
}

double ssim_from(const Matrix& y_true, const Matrix& y_hat,
                 const Matrix* mask, double count) {
  const double range = y_true.maxCoeff() - y_true.minCoeff();
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  Moments mo = moments_over(y_true, y_hat, mask, count);
  const double num = (2.0 * mo.mean_t * mo.mean_h + c1) * (2.0 * mo.cov + c2);
  const double den =
      (mo.mean_t * mo.mean_t + mo.mean_h * mo.mean_h + c1) *
      (mo.var_t + mo.var_h + c2);
  if (den == 0.0)
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

}  // namespace

double psnr(const Matrix& y_true, const Matrix& y_hat) {
  check_same_shape(y_true, y_hat);
  require(y_true.size() > 0, ErrorCode::invalid_argument,
          "psnr needs a nonempty matrix");
  require(y_true.cwiseAbs().maxCoeff() > 0.0, ErrorCode::invalid_argument,
          "psnr reference must not be all zero");
  const double peak = y_true.maxCoeff();
  const double err_sq = (y_hat - y_true).squaredNorm();
  return psnr_from(static_cast<double>(y_true.size()), peak, err_sq);
}

double psnr_masked(const Matrix& y_true, const Matrix& y_hat,
                   const Matrix& mask) {
  check_same_shape(y_true, y_hat);
  check_mask(y_true, mask);
  require(y_true.cwiseAbs().maxCoeff() > 0.0, ErrorCode::invalid_argument,
          "psnr reference must not be all zero");
  const double count = mask.sum();
  require(count > 0.0, ErrorCode::invalid_argument,
          "psnr mask selects no entries");
  const double peak = y_true.maxCoeff();
  const double err_sq = mask.cwiseProduct(y_hat - y_true).squaredNorm();
  return psnr_from(count, peak, err_sq);
}

double ssim(const Matrix& y_true, const Matrix& y_hat) {
  check_same_shape(y_true, y_hat);
  require(y_true.size() > 0, ErrorCode::invalid_argument,
          "ssim needs a nonempty matrix");
  return ssim_from(y_true, y_hat, nullptr,
                   static_cast<double>(y_true.size()));
}

double ssim_masked(const Matrix& y_true, const Matrix& y_hat,
                   const Matrix& mask) {
  check_same_shape(y_true, y_hat);
  check_mask(y_true, mask);
  const double count = mask.sum();
  require(count > 0.0, ErrorCode::invalid_argument,
          "ssim mask selects no entries");
  return ssim_from(y_true, y_hat, &mask, count);
}

double nmae(const Matrix& y_true, const Matrix& y_hat,
            const Matrix& hidden_mask, double y_min, double y_max) {
  check_same_shape(y_true, y_hat);
  check_mask(y_true, hidden_mask);
  require(y_max > y_min, ErrorCode::invalid_argument,
          "nmae bounds must satisfy y_max > y_min");
  const double count = hidden_mask.sum();
  require(count > 0.0, ErrorCode::invalid_argument,
          "nmae hidden set is empty");
  const double abs_err =
      hidden_mask.cwiseProduct(y_hat - y_true).cwiseAbs().sum();
  return abs_err / ((y_max - y_min) * count);
}

}  // namespace dualmc
