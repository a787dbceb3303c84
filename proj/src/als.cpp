// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "als.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace dualmc {

namespace {

double objective(const ObservedMatrix& y, const Matrix& u, const Matrix& v,
                 double ridge) {
  const double fit =
      y.indicator.cwiseProduct(u * v - y.values).squaredNorm();
  return fit + ridge * (u.squaredNorm() + v.squaredNorm());
}

}  // namespace

Matrix als_complete(const ObservedMatrix& y, Index rank, int iters,
                    double ridge, std::uint64_t seed,
                    std::vector<double>* objective_history) {
  const Index m = y.rows();
  const Index n = y.cols();
  require(rank >= 1 && rank < std::min(m, n), ErrorCode::invalid_argument,
          "als rank must satisfy 1 <= rank < min(m, n)");
  require(iters >= 0, ErrorCode::invalid_argument,
          "als iteration count must be non-negative");
  require(std::isfinite(ridge) && ridge >= 0.0, ErrorCode::invalid_argument,
          "als ridge must be finite and non-negative");
  require(y.observed_count() > 0, ErrorCode::invalid_argument,
          "als needs at least one observed entry");

  std::vector<std::vector<Index>> row_obs(static_cast<std::size_t>(m));
  std::vector<std::vector<Index>> col_obs(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      if (y.indicator(i, j) != 0.0) {
        row_obs[static_cast<std::size_t>(i)].push_back(j);
        col_obs[static_cast<std::size_t>(j)].push_back(i);
      }
  if (ridge == 0.0) {
    for (const auto& obs : row_obs)
      require(obs.size() >= static_cast<std::size_t>(rank),
              ErrorCode::numeric,
              "a row has fewer observed entries than the rank; "
              "set a positive ridge");
    for (const auto& obs : col_obs)
      require(obs.size() >= static_cast<std::size_t>(rank),
              ErrorCode::numeric,
              "a column has fewer observed entries than the rank; "
              "set a positive ridge");
  }

  Matrix u = Matrix::Zero(m, rank);
  Matrix v(rank, n);
  {
    Rng rng(derive_seed(seed, stream::als));
    const double bound = std::sqrt(6.0 / static_cast<double>(rank + n));
    for (Index i = 0; i < rank; ++i)
      for (Index j = 0; j < n; ++j) v(i, j) = rng.uniform(-bound, bound);
  }

  const Matrix reg = ridge * Matrix::Identity(rank, rank);
  if (objective_history) {
    objective_history->clear();
    objective_history->push_back(objective(y, u, v, ridge));
  }
  for (int it = 0; it < iters; ++it) {
    for (Index i = 0; i < m; ++i) {
      Matrix gram = reg;
      Vector rhs = Vector::Zero(rank);
      for (Index j : row_obs[static_cast<std::size_t>(i)]) {
        gram.noalias() += v.col(j) * v.col(j).transpose();
        rhs.noalias() += y.values(i, j) * v.col(j);
      }
      u.row(i) = gram.ldlt().solve(rhs).transpose();
    }
    for (Index j = 0; j < n; ++j) {
      Matrix gram = reg;
      Vector rhs = Vector::Zero(rank);
      for (Index i : col_obs[static_cast<std::size_t>(j)]) {
        gram.noalias() += u.row(i).transpose() * u.row(i);
        rhs.noalias() += y.values(i, j) * u.row(i).transpose();
      }
      v.col(j) = gram.ldlt().solve(rhs);
    }
    if (objective_history)
      objective_history->push_back(objective(y, u, v, ridge));
  }
  return u * v;
}

}  // namespace dualmc
