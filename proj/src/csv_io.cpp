// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <vector>

#include "error.hpp"

namespace dualmc {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Matrix load_dense_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (true) {
      while (p < end && *p == ' ') ++p;
      double value = 0.0;
      const auto [next, ec] = std::from_chars(p, end, value);
      require(ec == std::errc(), ErrorCode::parse,
              path + ":" + std::to_string(line_no) + ": non-numeric cell");
      row.push_back(value);
      p = next;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      require(*p == ',', ErrorCode::parse,
              path + ":" + std::to_string(line_no) + ": expected ',' separator");
      ++p;
    }
    if (!rows.empty())
      require(row.size() == rows.front().size(), ErrorCode::parse,
              path + ":" + std::to_string(line_no) + ": ragged row, expected " +
                  std::to_string(rows.front().size()) + " cells");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::parse, path + ": empty matrix file");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

void save_dense_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed for " + path);
}

}  // namespace dualmc
