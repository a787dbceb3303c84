// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "matrix_types.hpp"

namespace dualmc {

struct SyntheticSpec {
  Index m = 100;
  Index n = 200;
  Index r = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Nonlinear ground-truth matrix built from a seeded low-rank core AB
/// (A m x r, B r x n, i.i.d. standard normal) pushed through a scaled-tanh
/// saturation: g(1.2 (0.5 g(AB)^2 - g(AB) - 1)) + AB, g(x) = 1.7159 tanh(2x/3).
Matrix gen_synthetic(const SyntheticSpec& spec);

/// Same construction from caller-supplied factors (test hook: zero factors
/// give a constant matrix of g(-1.2)).
Matrix gen_synthetic_from_factors(const Matrix& a, const Matrix& b);

}  // namespace dualmc
