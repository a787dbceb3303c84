// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "dualmc.h"

#include <algorithm>
#include <cstring>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "als.hpp"
#include "csv_io.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"
#include "version.hpp"

struct dualmc_matrix {
  dualmc::Matrix value;
};

struct dualmc_observed {
  dualmc::ObservedMatrix value;
};

struct dualmc_config {
  dualmc::ExperimentConfig value;
};

struct dualmc_result {
  dualmc::CompletionResult value;
};

namespace {

thread_local std::string t_last_error;

dualmc_status status_from(dualmc::ErrorCode code) {
  using dualmc::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return DUALMC_ERR_INVALID_ARGUMENT;
    case ErrorCode::shape_mismatch: return DUALMC_ERR_SHAPE_MISMATCH;
    case ErrorCode::parse: return DUALMC_ERR_PARSE;
    case ErrorCode::io: return DUALMC_ERR_IO;
    case ErrorCode::numeric: return DUALMC_ERR_NUMERIC;
    case ErrorCode::unknown_key: return DUALMC_ERR_UNKNOWN_KEY;
  }
  return DUALMC_ERR_UNKNOWN;
}

// Runs the body, translating C++ failures into status codes.
template <typename Fn>
dualmc_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return DUALMC_OK;
  } catch (const dualmc::Error& e) {
    t_last_error = e.what();
    return status_from(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return DUALMC_ERR_UNKNOWN;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return DUALMC_ERR_UNKNOWN;
  }
}

dualmc_status fail_argument(const char* message) {
  t_last_error = message;
  return DUALMC_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* dualmc_version(void) { return dualmc::kVersion; }

const char* dualmc_last_error(void) { return t_last_error.c_str(); }

dualmc_status dualmc_matrix_create(size_t rows, size_t cols,
                                   const double* data_row_major,
                                   dualmc_matrix** out) {
  if (!out) return fail_argument("out must not be NULL");
  if (rows == 0 || cols == 0)
    return fail_argument("matrix dimensions must be positive");
  return guarded([&] {
    auto m = std::make_unique<dualmc_matrix>();
    m->value = dualmc::Matrix::Zero(static_cast<dualmc::Index>(rows),
                                    static_cast<dualmc::Index>(cols));
    if (data_row_major)
      for (size_t i = 0; i < rows; ++i)
        for (size_t j = 0; j < cols; ++j)
          m->value(static_cast<dualmc::Index>(i),
                   static_cast<dualmc::Index>(j)) =
              data_row_major[i * cols + j];
    *out = m.release();
  });
}

void dualmc_matrix_destroy(dualmc_matrix* m) { delete m; }

size_t dualmc_matrix_rows(const dualmc_matrix* m) {
  return m ? static_cast<size_t>(m->value.rows()) : 0;
}

size_t dualmc_matrix_cols(const dualmc_matrix* m) {
  return m ? static_cast<size_t>(m->value.cols()) : 0;
}

dualmc_status dualmc_matrix_copy_data(const dualmc_matrix* m,
                                      double* out_row_major,
                                      size_t capacity) {
  if (!m || !out_row_major)
    return fail_argument("matrix and out buffer must not be NULL");
  const auto needed = static_cast<size_t>(m->value.size());
  if (capacity < needed)
    return fail_argument("buffer capacity below rows*cols");
  for (dualmc::Index i = 0; i < m->value.rows(); ++i)
    for (dualmc::Index j = 0; j < m->value.cols(); ++j)
      out_row_major[static_cast<size_t>(i) *
                        static_cast<size_t>(m->value.cols()) +
                    static_cast<size_t>(j)] = m->value(i, j);
  t_last_error.clear();
  return DUALMC_OK;
}

dualmc_status dualmc_matrix_load_csv(const char* path, dualmc_matrix** out) {
  if (!path || !out) return fail_argument("path and out must not be NULL");
  return guarded([&] {
    auto m = std::make_unique<dualmc_matrix>();
    m->value = dualmc::load_dense_csv(path);
    *out = m.release();
  });
}

dualmc_status dualmc_matrix_save_csv(const dualmc_matrix* m,
                                     const char* path) {
  if (!m || !path) return fail_argument("matrix and path must not be NULL");
  return guarded([&] { dualmc::save_dense_csv(m->value, path); });
}

dualmc_status dualmc_observed_create(const dualmc_matrix* values,
                                     const dualmc_matrix* indicator,
                                     dualmc_observed** out) {
  if (!values || !indicator || !out)
    return fail_argument("values, indicator and out must not be NULL");
  return guarded([&] {
    auto o = std::make_unique<dualmc_observed>();
    o->value = dualmc::build_observed(values->value, indicator->value);
    *out = o.release();
  });
}

void dualmc_observed_destroy(dualmc_observed* o) { delete o; }

dualmc_status dualmc_config_create(dualmc_config** out) {
  if (!out) return fail_argument("out must not be NULL");
  return guarded([&] { *out = new dualmc_config(); });
}

dualmc_status dualmc_config_load(const char* path, dualmc_config** out) {
  if (!path || !out) return fail_argument("path and out must not be NULL");
  return guarded([&] {
    auto cfg = std::make_unique<dualmc_config>();
    cfg->value = dualmc::config_load_file(path);
    *out = cfg.release();
  });
}

dualmc_status dualmc_config_set(dualmc_config* cfg, const char* key,
                                const char* value) {
  if (!cfg || !key || !value)
    return fail_argument("config, key and value must not be NULL");
  return guarded([&] { dualmc::config_set(cfg->value, key, value); });
}

dualmc_status dualmc_config_dump(const dualmc_config* cfg, char* buffer,
                                 size_t capacity, size_t* needed) {
  if (!cfg || !needed)
    return fail_argument("config and needed must not be NULL");
  return guarded([&] {
    const std::string text = dualmc::config_dump(cfg->value);
    *needed = text.size() + 1;
    if (buffer && capacity > 0) {
      const size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

const char* dualmc_config_help(void) {
  static const std::string help = dualmc::config_keys_help();
  return help.c_str();
}

void dualmc_config_destroy(dualmc_config* cfg) { delete cfg; }

dualmc_status dualmc_complete(const dualmc_observed* observed,
                              const dualmc_config* cfg,
                              dualmc_result** out) {
  if (!observed || !cfg || !out)
    return fail_argument("observed, config and out must not be NULL");
  return guarded([&] {
    auto result = std::make_unique<dualmc_result>();
    result->value = dualmc::complete(
        observed->value, dualmc::resolved_model_config(cfg->value));
    for (const auto& warning : result->value.warnings)
      std::cerr << "warning: " << warning << '\n';
    *out = result.release();
  });
}

dualmc_status dualmc_result_completed(const dualmc_result* result,
                                      dualmc_matrix** out) {
  if (!result || !out)
    return fail_argument("result and out must not be NULL");
  return guarded([&] {
    auto m = std::make_unique<dualmc_matrix>();
    m->value = result->value.completed;
    *out = m.release();
  });
}

dualmc_status dualmc_result_loss_history(const dualmc_result* result,
                                         double* out, size_t capacity,
                                         size_t* count) {
  if (!result || !count)
    return fail_argument("result and count must not be NULL");
  *count = result->value.loss_history.size();
  if (out) {
    if (capacity < *count)
      return fail_argument("buffer capacity below history length");
    std::memcpy(out, result->value.loss_history.data(),
                *count * sizeof(double));
  }
  t_last_error.clear();
  return DUALMC_OK;
}

int dualmc_result_iterations(const dualmc_result* result) {
  return result ? result->value.iterations_run : 0;
}

void dualmc_result_destroy(dualmc_result* result) { delete result; }

dualmc_status dualmc_psnr(const dualmc_matrix* y_true,
                          const dualmc_matrix* y_hat, double* out) {
  if (!y_true || !y_hat || !out)
    return fail_argument("inputs and out must not be NULL");
  return guarded([&] { *out = dualmc::psnr(y_true->value, y_hat->value); });
}

dualmc_status dualmc_ssim(const dualmc_matrix* y_true,
                          const dualmc_matrix* y_hat, double* out) {
  if (!y_true || !y_hat || !out)
    return fail_argument("inputs and out must not be NULL");
  return guarded([&] { *out = dualmc::ssim(y_true->value, y_hat->value); });
}

dualmc_status dualmc_nmae(const dualmc_matrix* y_true,
                          const dualmc_matrix* y_hat,
                          const dualmc_matrix* hidden_mask, double y_min,
                          double y_max, double* out) {
  if (!y_true || !y_hat || !hidden_mask || !out)
    return fail_argument("inputs and out must not be NULL");
  return guarded([&] {
    *out = dualmc::nmae(y_true->value, y_hat->value, hidden_mask->value,
                        y_min, y_max);
  });
}

dualmc_status dualmc_als(const dualmc_observed* observed, size_t rank,
                         int iters, double ridge, uint64_t seed,
                         dualmc_matrix** out) {
  if (!observed || !out)
    return fail_argument("observed and out must not be NULL");
  return guarded([&] {
    auto m = std::make_unique<dualmc_matrix>();
    m->value = dualmc::als_complete(observed->value,
                                    static_cast<dualmc::Index>(rank), iters,
                                    ridge, seed);
    *out = m.release();
  });
}

dualmc_status dualmc_synthetic(size_t m, size_t n, size_t rank,
                               uint64_t seed, dualmc_matrix** out) {
  if (!out) return fail_argument("out must not be NULL");
  return guarded([&] {
    dualmc::SyntheticSpec spec;
    spec.m = static_cast<dualmc::Index>(m);
    spec.n = static_cast<dualmc::Index>(n);
    spec.r = static_cast<dualmc::Index>(rank);
    spec.seed = seed;
    auto mat = std::make_unique<dualmc_matrix>();
    mat->value = dualmc::gen_synthetic(spec);
    *out = mat.release();
  });
}

dualmc_status dualmc_random_mask(size_t rows, size_t cols, double fraction,
                                 uint64_t seed, dualmc_matrix** out) {
  if (!out) return fail_argument("out must not be NULL");
  return guarded([&] {
    dualmc::MaskSpec spec;
    spec.kind = dualmc::MaskSpec::Kind::random;
    spec.fraction = fraction;
    spec.seed = seed;
    auto m = std::make_unique<dualmc_matrix>();
    m->value = dualmc::generate_mask(static_cast<dualmc::Index>(rows),
                                     static_cast<dualmc::Index>(cols), spec);
    *out = m.release();
  });
}

dualmc_status dualmc_run(const char* subcommand, const dualmc_config* cfg,
                         int* exit_code) {
  if (!subcommand || !cfg || !exit_code)
    return fail_argument("subcommand, config and exit_code must not be NULL");
  return guarded([&] {
    *exit_code = dualmc::run_experiment(
        dualmc::subcommand_from_string(subcommand), cfg->value, std::cout,
        std::cerr);
  });
}

}  // extern "C"
