// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "matrix_types.hpp"

namespace dualmc {

// Dense matrix CSV: comma-separated, '.' decimal, no header, one matrix row
// per line. Saved values round-trip exactly (17 significant digits).

Matrix load_dense_csv(const std::string& path);
void save_dense_csv(const Matrix& m, const std::string& path);

/// Shortest-round-trip style formatting used for all CSV output ("%.17g").
std::string format_double(double v);

}  // namespace dualmc
