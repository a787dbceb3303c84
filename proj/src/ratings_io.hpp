// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "observed.hpp"

namespace dualmc {

struct RatingTriplet {
  Index row = 0;  // 0-based
  Index col = 0;  // 0-based
  double value = 0.0;
};

struct RatingsTable {
  std::vector<RatingTriplet> triplets;  // in file order, duplicates included
  double y_min = 1.0;
  double y_max = 5.0;
  Index rows = 0;
  Index cols = 0;
  std::size_t duplicate_count = 0;
};

/// Tab-separated (by default) "user item rating [extra...]" lines with
/// 1-based ids. Shape is inferred from the largest ids. A repeated
/// (user, item) pair keeps the last rating and bumps duplicate_count.
/// Ratings outside [y_min, y_max] and malformed lines fail with the line
/// number.
std::pair<ObservedMatrix, RatingsTable> load_ratings(const std::string& path,
                                                     char delimiter,
                                                     double y_min,
                                                     double y_max);

}  // namespace dualmc
