// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "observed.hpp"

namespace dualmc {

/// Linear matrix-factorization baseline: alternating ridge-regularized least
/// squares for Y ~ U (m x rank) * V (rank x n) over observed entries only.
/// V starts from the seeded symmetric-uniform law; U is solved first, so the
/// run is deterministic under the seed. When objective_history is non-null
/// it receives the regularized objective before training and after each
/// alternation (exact subproblem solves make it non-increasing).
Matrix als_complete(const ObservedMatrix& y, Index rank, int iters,
                    double ridge, std::uint64_t seed,
                    std::vector<double>* objective_history = nullptr);

}  // namespace dualmc
