/* SPDX-FileCopyrightText: © 2026 The dualmc authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the dualmc matrix-completion engine.
 *
 * Conventions:
 *   - Every fallible call returns a dualmc_status; DUALMC_OK is 0.
 *   - On failure, dualmc_last_error() returns a message for the calling
 *     thread, valid until the thread's next dualmc call.
 *   - Objects returned through out-parameters are owned by the caller and
 *     released with the matching _destroy function. Destroy functions
 *     accept NULL.
 *   - Matrix data crosses the boundary in row-major order.
 */
#ifndef DUALMC_H
#define DUALMC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dualmc_status {
  DUALMC_OK = 0,
  DUALMC_ERR_INVALID_ARGUMENT = 1,
  DUALMC_ERR_SHAPE_MISMATCH = 2,
  DUALMC_ERR_PARSE = 3,
  DUALMC_ERR_IO = 4,
  DUALMC_ERR_NUMERIC = 5,
  DUALMC_ERR_UNKNOWN_KEY = 6,
  DUALMC_ERR_UNKNOWN = 7
} dualmc_status;

/* Library version string, e.g. "0.1.0". */
const char* dualmc_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* dualmc_last_error(void);

/* ---------------------------------------------------------------- matrix */

typedef struct dualmc_matrix dualmc_matrix;

/* rows x cols dense matrix; data may be NULL for a zero matrix. */
dualmc_status dualmc_matrix_create(size_t rows, size_t cols,
                                   const double* data_row_major,
                                   dualmc_matrix** out);
void dualmc_matrix_destroy(dualmc_matrix* m);
size_t dualmc_matrix_rows(const dualmc_matrix* m);
size_t dualmc_matrix_cols(const dualmc_matrix* m);

/* Copies all entries into out (row-major); capacity is in doubles and must
 * be at least rows*cols. */
dualmc_status dualmc_matrix_copy_data(const dualmc_matrix* m,
                                      double* out_row_major,
                                      size_t capacity);

dualmc_status dualmc_matrix_load_csv(const char* path, dualmc_matrix** out);
dualmc_status dualmc_matrix_save_csv(const dualmc_matrix* m,
                                     const char* path);

/* -------------------------------------------------------------- observed */

typedef struct dualmc_observed dualmc_observed;

/* Pairs values with a 0/1 indicator of the same shape (1 = observed). */
dualmc_status dualmc_observed_create(const dualmc_matrix* values,
                                     const dualmc_matrix* indicator,
                                     dualmc_observed** out);
void dualmc_observed_destroy(dualmc_observed* o);

/* ---------------------------------------------------------------- config */

typedef struct dualmc_config dualmc_config;

/* Config with default values for every key. */
dualmc_status dualmc_config_create(dualmc_config** out);

/* Loads a `key = value` config file on top of the defaults. */
dualmc_status dualmc_config_load(const char* path, dualmc_config** out);

/* Sets one key; unknown keys yield DUALMC_ERR_UNKNOWN_KEY. */
dualmc_status dualmc_config_set(dualmc_config* cfg, const char* key,
                                const char* value);

/* Canonical `key = value` echo of the whole config. Writes up to capacity
 * bytes including the terminator; *needed receives the full size. */
dualmc_status dualmc_config_dump(const dualmc_config* cfg, char* buffer,
                                 size_t capacity, size_t* needed);

/* Static reference text describing every key, type and default. */
const char* dualmc_config_help(void);

void dualmc_config_destroy(dualmc_config* cfg);

/* ------------------------------------------------------------ completion */

typedef struct dualmc_result dualmc_result;

/* Trains the two-branch model on the observed matrix per the config's
 * model keys and reconstructs the full matrix. */
dualmc_status dualmc_complete(const dualmc_observed* observed,
                              const dualmc_config* cfg,
                              dualmc_result** out);

dualmc_status dualmc_result_completed(const dualmc_result* result,
                                      dualmc_matrix** out);

/* Number of per-iteration loss values; fetch them with capacity >= count. */
dualmc_status dualmc_result_loss_history(const dualmc_result* result,
                                         double* out, size_t capacity,
                                         size_t* count);
int dualmc_result_iterations(const dualmc_result* result);
void dualmc_result_destroy(dualmc_result* result);

/* --------------------------------------------------------------- metrics */

dualmc_status dualmc_psnr(const dualmc_matrix* y_true,
                          const dualmc_matrix* y_hat, double* out);
dualmc_status dualmc_ssim(const dualmc_matrix* y_true,
                          const dualmc_matrix* y_hat, double* out);
dualmc_status dualmc_nmae(const dualmc_matrix* y_true,
                          const dualmc_matrix* y_hat,
                          const dualmc_matrix* hidden_mask, double y_min,
                          double y_max, double* out);

/* ------------------------------------------------- baseline and datasets */

/* Alternating least squares baseline; returns the reconstructed matrix. */
dualmc_status dualmc_als(const dualmc_observed* observed, size_t rank,
                         int iters, double ridge, uint64_t seed,
                         dualmc_matrix** out);

/* Seeded nonlinear synthetic dataset (rank-r core). */
dualmc_status dualmc_synthetic(size_t m, size_t n, size_t rank,
                               uint64_t seed, dualmc_matrix** out);

/* 0/1 observation indicator hiding round(fraction*m*n) random entries. */
dualmc_status dualmc_random_mask(size_t rows, size_t cols, double fraction,
                                 uint64_t seed, dualmc_matrix** out);

/* ------------------------------------------------------------ experiment */

/* Runs a full subcommand ("complete", "synth-bench", "inpaint",
 * "gradcheck", "ablate"): writes the manifest and report files under the
 * config's output_dir and prints a summary to stdout/stderr. *exit_code
 * receives the process exit code (nonzero for a failed gradcheck). */
dualmc_status dualmc_run(const char* subcommand, const dualmc_config* cfg,
                         int* exit_code);

#ifdef __cplusplus
}
#endif

#endif /* DUALMC_H */
