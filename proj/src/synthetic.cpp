// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "synthetic.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace dualmc {

void SyntheticSpec::validate() const {
  require(m > 0 && n > 0 && r > 0, ErrorCode::invalid_argument,
          "synthetic dimensions must be positive");
  require(r < std::min(m, n), ErrorCode::invalid_argument,
          "synthetic rank must be below min(m, n)");
}

namespace {

inline double g(double x) { return 1.7159 * std::tanh(2.0 * x / 3.0); }

}  // namespace

Matrix gen_synthetic_from_factors(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::shape_mismatch,
          "factor inner dimensions must agree");
  Matrix core = a * b;
  Matrix out(core.rows(), core.cols());
  for (Index j = 0; j < core.cols(); ++j)
    for (Index i = 0; i < core.rows(); ++i) {
      const double gc = g(core(i, j));
      out(i, j) = g(1.2 * (0.5 * gc * gc - gc - 1.0)) + core(i, j);
    }
  return out;
}

Matrix gen_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, stream::synthetic));
  Matrix a(spec.m, spec.r);
  for (Index i = 0; i < spec.m; ++i)
    for (Index j = 0; j < spec.r; ++j) a(i, j) = rng.normal();
  Matrix b(spec.r, spec.n);
  for (Index i = 0; i < spec.r; ++i)
    for (Index j = 0; j < spec.n; ++j) b(i, j) = rng.normal();
  return gen_synthetic_from_factors(a, b);
}

}  // namespace dualmc
