// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace dualmc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dualmc
