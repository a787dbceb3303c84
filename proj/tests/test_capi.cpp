// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared library strictly through the public C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <dualmc.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("dualmc_capi_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("version string is exposed") {
  CHECK(std::string(dualmc_version()) == "0.1.0");
}

TEST_CASE("matrix create, inspect, copy and destroy") {
  const double data[6] = {1, 2, 3, 4, 5, 6};
  dualmc_matrix* m = nullptr;
  REQUIRE(dualmc_matrix_create(2, 3, data, &m) == DUALMC_OK);
  CHECK(dualmc_matrix_rows(m) == 2);
  CHECK(dualmc_matrix_cols(m) == 3);
  double out[6] = {};
  REQUIRE(dualmc_matrix_copy_data(m, out, 6) == DUALMC_OK);
  for (int i = 0; i < 6; ++i) CHECK(out[i] == data[i]);
  CHECK(dualmc_matrix_copy_data(m, out, 5) == DUALMC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(dualmc_last_error()).size() > 0);
  dualmc_matrix_destroy(m);

  dualmc_matrix* z = nullptr;
  REQUIRE(dualmc_matrix_create(2, 2, nullptr, &z) == DUALMC_OK);
  double zout[4] = {9, 9, 9, 9};
  REQUIRE(dualmc_matrix_copy_data(z, zout, 4) == DUALMC_OK);
  for (int i = 0; i < 4; ++i) CHECK(zout[i] == 0.0);
  dualmc_matrix_destroy(z);

  CHECK(dualmc_matrix_create(0, 3, nullptr, &z) == DUALMC_ERR_INVALID_ARGUMENT);
  CHECK(dualmc_matrix_create(2, 3, data, nullptr) == DUALMC_ERR_INVALID_ARGUMENT);
  dualmc_matrix_destroy(nullptr);  // must be a no-op
}

TEST_CASE("matrix csv round trip through the shared library") {
  TempDir tmp("csv");
  const double data[4] = {0.5, -1.25, 3e-7, 42.0};
  dualmc_matrix* m = nullptr;
  REQUIRE(dualmc_matrix_create(2, 2, data, &m) == DUALMC_OK);
  REQUIRE(dualmc_matrix_save_csv(m, tmp.file("m.csv").c_str()) == DUALMC_OK);
  dualmc_matrix* back = nullptr;
  REQUIRE(dualmc_matrix_load_csv(tmp.file("m.csv").c_str(), &back) == DUALMC_OK);
  double out[4] = {};
  REQUIRE(dualmc_matrix_copy_data(back, out, 4) == DUALMC_OK);
  for (int i = 0; i < 4; ++i) CHECK(out[i] == data[i]);
  dualmc_matrix_destroy(m);
  dualmc_matrix_destroy(back);

  CHECK(dualmc_matrix_load_csv(tmp.file("nope.csv").c_str(), &back) ==
        DUALMC_ERR_IO);
}

TEST_CASE("observed pairs validate shapes and indicator values") {
  const double v[4] = {1, 2, 3, 4};
  const double ind_ok[4] = {1, 0, 0, 1};
  const double ind_bad[4] = {1, 0.5, 0, 1};
  dualmc_matrix *values = nullptr, *good = nullptr, *bad = nullptr, *wide = nullptr;
  REQUIRE(dualmc_matrix_create(2, 2, v, &values) == DUALMC_OK);
  REQUIRE(dualmc_matrix_create(2, 2, ind_ok, &good) == DUALMC_OK);
  REQUIRE(dualmc_matrix_create(2, 2, ind_bad, &bad) == DUALMC_OK);
  REQUIRE(dualmc_matrix_create(1, 4, ind_ok, &wide) == DUALMC_OK);

  dualmc_observed* obs = nullptr;
  CHECK(dualmc_observed_create(values, good, &obs) == DUALMC_OK);
  dualmc_observed_destroy(obs);
  CHECK(dualmc_observed_create(values, bad, &obs) == DUALMC_ERR_INVALID_ARGUMENT);
  CHECK(dualmc_observed_create(values, wide, &obs) == DUALMC_ERR_SHAPE_MISMATCH);

  dualmc_matrix_destroy(values);
  dualmc_matrix_destroy(good);
  dualmc_matrix_destroy(bad);
  dualmc_matrix_destroy(wide);
}

TEST_CASE("config set, unknown keys and dump round trips") {
  dualmc_config* cfg = nullptr;
  REQUIRE(dualmc_config_create(&cfg) == DUALMC_OK);
  CHECK(dualmc_config_set(cfg, "rank", "4") == DUALMC_OK);
  CHECK(dualmc_config_set(cfg, "rnk", "4") == DUALMC_ERR_UNKNOWN_KEY);
  CHECK(std::string(dualmc_last_error()).find("rnk") != std::string::npos);
  CHECK(dualmc_config_set(cfg, "rank", "banana") == DUALMC_ERR_PARSE);

  size_t needed = 0;
  REQUIRE(dualmc_config_dump(cfg, nullptr, 0, &needed) == DUALMC_OK);
  REQUIRE(needed > 0);
  std::vector<char> buf(needed);
  REQUIRE(dualmc_config_dump(cfg, buf.data(), buf.size(), &needed) == DUALMC_OK);
  const std::string dump(buf.data());
  CHECK(dump.find("rank = 4\n") != std::string::npos);

  const char* help = dualmc_config_help();
  CHECK(std::string(help).find("rank (int") != std::string::npos);
  dualmc_config_destroy(cfg);
}

TEST_CASE("end-to-end completion through the C API") {
  dualmc_matrix* truth = nullptr;
  REQUIRE(dualmc_synthetic(12, 15, 3, 7, &truth) == DUALMC_OK);
  dualmc_matrix* mask = nullptr;
  REQUIRE(dualmc_random_mask(12, 15, 0.25, 11, &mask) == DUALMC_OK);

  // Apply the mask to the truth to build the observed values.
  std::vector<double> tv(12 * 15), mv(12 * 15);
  REQUIRE(dualmc_matrix_copy_data(truth, tv.data(), tv.size()) == DUALMC_OK);
  REQUIRE(dualmc_matrix_copy_data(mask, mv.data(), mv.size()) == DUALMC_OK);
  std::vector<double> observed_values(12 * 15);
  for (size_t i = 0; i < tv.size(); ++i) observed_values[i] = tv[i] * mv[i];
  dualmc_matrix* values = nullptr;
  REQUIRE(dualmc_matrix_create(12, 15, observed_values.data(), &values) ==
          DUALMC_OK);
  dualmc_observed* obs = nullptr;
  REQUIRE(dualmc_observed_create(values, mask, &obs) == DUALMC_OK);

  dualmc_config* cfg = nullptr;
  REQUIRE(dualmc_config_create(&cfg) == DUALMC_OK);
  REQUIRE(dualmc_config_set(cfg, "rank", "3") == DUALMC_OK);
  REQUIRE(dualmc_config_set(cfg, "col_hidden", "5") == DUALMC_OK);
  REQUIRE(dualmc_config_set(cfg, "row_hidden", "6") == DUALMC_OK);
  REQUIRE(dualmc_config_set(cfg, "max_iters", "40") == DUALMC_OK);

  dualmc_result* result = nullptr;
  REQUIRE(dualmc_complete(obs, cfg, &result) == DUALMC_OK);
  CHECK(dualmc_result_iterations(result) == 40);

  size_t count = 0;
  REQUIRE(dualmc_result_loss_history(result, nullptr, 0, &count) == DUALMC_OK);
  REQUIRE(count == 40);
  std::vector<double> history(count);
  REQUIRE(dualmc_result_loss_history(result, history.data(), count, &count) ==
          DUALMC_OK);
  CHECK(history.back() < history.front());

  dualmc_matrix* completed = nullptr;
  REQUIRE(dualmc_result_completed(result, &completed) == DUALMC_OK);
  CHECK(dualmc_matrix_rows(completed) == 12);
  CHECK(dualmc_matrix_cols(completed) == 15);

  // Observed entries clamp to their inputs by default.
  std::vector<double> cv(12 * 15);
  REQUIRE(dualmc_matrix_copy_data(completed, cv.data(), cv.size()) == DUALMC_OK);
  for (size_t i = 0; i < cv.size(); ++i)
    if (mv[i] == 1.0) CHECK(cv[i] == tv[i]);

  // And the completion is closer to the truth than a zero fill on hidden.
  double err = 0.0, ref = 0.0;
  for (size_t i = 0; i < cv.size(); ++i)
    if (mv[i] == 0.0) {
      err += (cv[i] - tv[i]) * (cv[i] - tv[i]);
      ref += tv[i] * tv[i];
    }
  CHECK(err < ref);

  dualmc_matrix_destroy(completed);
  dualmc_result_destroy(result);
  dualmc_config_destroy(cfg);
  dualmc_observed_destroy(obs);
  dualmc_matrix_destroy(values);
  dualmc_matrix_destroy(mask);
  dualmc_matrix_destroy(truth);
}

TEST_CASE("metrics through the C API, including error statuses") {
  const double a[4] = {1, 0, 0, 0};
  const double b[4] = {1.1, 0.1, -0.1, 0.1};
  dualmc_matrix *ma = nullptr, *mb = nullptr;
  REQUIRE(dualmc_matrix_create(2, 2, a, &ma) == DUALMC_OK);
  REQUIRE(dualmc_matrix_create(2, 2, b, &mb) == DUALMC_OK);

  double v = 0.0;
  REQUIRE(dualmc_psnr(ma, mb, &v) == DUALMC_OK);
  CHECK(std::fabs(v - 20.0) < 1e-12);
  REQUIRE(dualmc_ssim(ma, ma, &v) == DUALMC_OK);
  CHECK(std::fabs(v - 1.0) < 1e-12);

  const double hidden[4] = {1, 0, 0, 1};
  dualmc_matrix* mh = nullptr;
  REQUIRE(dualmc_matrix_create(2, 2, hidden, &mh) == DUALMC_OK);
  REQUIRE(dualmc_nmae(ma, mb, mh, 0.0, 1.0, &v) == DUALMC_OK);
  CHECK(std::fabs(v - 0.1) < 1e-12);

  CHECK(dualmc_psnr(ma, nullptr, &v) == DUALMC_ERR_INVALID_ARGUMENT);
  CHECK(dualmc_psnr(ma, mb, nullptr) == DUALMC_ERR_INVALID_ARGUMENT);
  dualmc_matrix* wide = nullptr;
  REQUIRE(dualmc_matrix_create(1, 4, a, &wide) == DUALMC_OK);
  CHECK(dualmc_psnr(ma, wide, &v) == DUALMC_ERR_SHAPE_MISMATCH);

  dualmc_matrix_destroy(ma);
  dualmc_matrix_destroy(mb);
  dualmc_matrix_destroy(mh);
  dualmc_matrix_destroy(wide);
}

TEST_CASE("als baseline through the C API") {
  dualmc_matrix* truth = nullptr;
  REQUIRE(dualmc_synthetic(10, 12, 2, 3, &truth) == DUALMC_OK);
  dualmc_matrix* mask = nullptr;
  REQUIRE(dualmc_random_mask(10, 12, 0.2, 4, &mask) == DUALMC_OK);
  std::vector<double> tv(120), mv(120), ov(120);
  REQUIRE(dualmc_matrix_copy_data(truth, tv.data(), 120) == DUALMC_OK);
  REQUIRE(dualmc_matrix_copy_data(mask, mv.data(), 120) == DUALMC_OK);
  for (int i = 0; i < 120; ++i) ov[i] = tv[i] * mv[i];
  dualmc_matrix* values = nullptr;
  REQUIRE(dualmc_matrix_create(10, 12, ov.data(), &values) == DUALMC_OK);
  dualmc_observed* obs = nullptr;
  REQUIRE(dualmc_observed_create(values, mask, &obs) == DUALMC_OK);

  dualmc_matrix* rec = nullptr;
  REQUIRE(dualmc_als(obs, 4, 30, 0.01, 0, &rec) == DUALMC_OK);
  CHECK(dualmc_matrix_rows(rec) == 10);
  CHECK(dualmc_als(obs, 0, 30, 0.01, 0, &rec) == DUALMC_ERR_INVALID_ARGUMENT);

  dualmc_matrix_destroy(rec);
  dualmc_observed_destroy(obs);
  dualmc_matrix_destroy(values);
  dualmc_matrix_destroy(mask);
  dualmc_matrix_destroy(truth);
}

TEST_CASE("random mask fraction validation crosses the boundary") {
  dualmc_matrix* mask = nullptr;
  CHECK(dualmc_random_mask(5, 5, 1.5, 0, &mask) == DUALMC_ERR_INVALID_ARGUMENT);
  CHECK(dualmc_random_mask(5, 5, -0.1, 0, &mask) == DUALMC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("a full subcommand runs through dualmc_run") {
  TempDir tmp("run");
  dualmc_config* cfg = nullptr;
  REQUIRE(dualmc_config_create(&cfg) == DUALMC_OK);
  REQUIRE(dualmc_config_set(cfg, "output_dir", tmp.path.string().c_str()) ==
          DUALMC_OK);
  REQUIRE(dualmc_config_set(cfg, "gradcheck.instances", "2") == DUALMC_OK);

  int exit_code = -1;
  REQUIRE(dualmc_run("gradcheck", cfg, &exit_code) == DUALMC_OK);
  CHECK(exit_code == 0);
  CHECK(fs::exists(tmp.file("manifest.txt")));
  CHECK(fs::exists(tmp.file("gradcheck.csv")));

  CHECK(dualmc_run("fly", cfg, &exit_code) == DUALMC_ERR_INVALID_ARGUMENT);
  dualmc_config_destroy(cfg);
}
