// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "ratings_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace dualmc {

namespace {

[[noreturn]] void fail_line(const std::string& path, std::size_t line_no,
                            const std::string& what) {
  throw Error(ErrorCode::parse,
              path + ":" + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

long long parse_id(const std::string& field, const std::string& path,
                   std::size_t line_no, const char* which) {
  long long id = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), id);
  if (ec != std::errc() || ptr != field.data() + field.size() || id < 1)
    fail_line(path, line_no,
              std::string(which) + " id must be a positive integer, got '" +
                  field + "'");
  return id;
}

double parse_rating(const std::string& field, const std::string& path,
                    std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    fail_line(path, line_no, "rating is not numeric: '" + field + "'");
  return value;
}

}  // namespace

std::pair<ObservedMatrix, RatingsTable> load_ratings(const std::string& path,
                                                     char delimiter,
                                                     double y_min,
                                                     double y_max) {
  require(y_max > y_min, ErrorCode::invalid_argument,
          "rating bounds must satisfy y_max > y_min");
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open ratings file: " + path);

  RatingsTable table;
  table.y_min = y_min;
  table.y_max = y_max;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, delimiter);
    if (fields.size() < 3)
      fail_line(path, line_no, "expected at least 3 fields, got " +
                                   std::to_string(fields.size()));
    const long long user = parse_id(fields[0], path, line_no, "user");
    const long long item = parse_id(fields[1], path, line_no, "item");
    const double rating = parse_rating(fields[2], path, line_no);
    if (rating < y_min || rating > y_max)
      fail_line(path, line_no, "rating " + std::to_string(rating) +
                                   " outside declared bounds");
    table.triplets.push_back(
        {static_cast<Index>(user - 1), static_cast<Index>(item - 1), rating});
    table.rows = std::max(table.rows, static_cast<Index>(user));
    table.cols = std::max(table.cols, static_cast<Index>(item));
  }
  require(!table.triplets.empty(), ErrorCode::parse,
          "ratings file has no data lines: " + path);

  Matrix values = Matrix::Zero(table.rows, table.cols);
  Matrix indicator = Matrix::Zero(table.rows, table.cols);
  for (const auto& t : table.triplets) {
    if (indicator(t.row, t.col) != 0.0) ++table.duplicate_count;
    values(t.row, t.col) = t.value;
    indicator(t.row, t.col) = 1.0;
  }
  return {build_observed(values, indicator), std::move(table)};
}

}  // namespace dualmc
