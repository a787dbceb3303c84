// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"
#include "rprop.hpp"

using namespace dualmc;

TEST_CASE("config validation rejects inconsistent step laws") {
  RpropConfig cfg;
  cfg.validate();
  cfg.eta_minus = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RpropConfig{};
  cfg.eta_plus = 0.9;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RpropConfig{};
  cfg.delta_min = 1.0;
  cfg.delta_max = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = RpropConfig{};
  cfg.delta_init = 1e-9;  // below delta_min
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("fresh state starts with delta_init and an infinite loss") {
  const RpropConfig cfg;
  const RpropState st = init_rprop(4, cfg);
  CHECK(st.prev_grad == std::vector<double>(4, 0.0));
  CHECK(st.prev_update == std::vector<double>(4, 0.0));
  CHECK(st.delta == std::vector<double>(4, cfg.delta_init));
  CHECK(std::isinf(st.prev_loss));
  CHECK(st.prev_loss > 0);
}

TEST_CASE("sign agreement grows the step and moves against the gradient") {
  const RpropConfig cfg;
  RpropState st = init_rprop(1, cfg);
  st.prev_grad[0] = 0.1;
  st.delta[0] = 0.1;
  std::vector<double> x{1.0};
  std::vector<double> g{0.2};
  rprop_step(x, g, 5.0, st, cfg);
  CHECK(st.delta[0] == doctest::Approx(0.12).epsilon(1e-15));
  CHECK(x[0] == doctest::Approx(1.0 - 0.12).epsilon(1e-15));
  CHECK(st.prev_update[0] == doctest::Approx(-0.12).epsilon(1e-15));
  CHECK(st.prev_grad[0] == 0.2);
  CHECK(st.prev_loss == 5.0);
}

TEST_CASE("sign flip shrinks the step and reverts only on a worse loss") {
  const RpropConfig cfg;

  // Loss got worse: undo the previous move, clear the stored gradient.
  {
    RpropState st = init_rprop(1, cfg);
    st.prev_grad[0] = 0.1;
    st.prev_update[0] = -0.12;
    st.delta[0] = 0.1;
    st.prev_loss = 5.0;
    std::vector<double> x{0.88};
    std::vector<double> g{-0.2};
    rprop_step(x, g, 6.0, st, cfg);
    CHECK(st.delta[0] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(x[0] == doctest::Approx(0.88 + 0.12).epsilon(1e-15));
    CHECK(st.prev_grad[0] == 0.0);
    CHECK(st.prev_update[0] == 0.0);
  }

  // Loss improved despite the flip: keep the position, just shrink.
  {
    RpropState st = init_rprop(1, cfg);
    st.prev_grad[0] = 0.1;
    st.prev_update[0] = -0.12;
    st.delta[0] = 0.1;
    st.prev_loss = 5.0;
    std::vector<double> x{0.88};
    std::vector<double> g{-0.2};
    rprop_step(x, g, 4.0, st, cfg);
    CHECK(st.delta[0] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(x[0] == 0.88);
    CHECK(st.prev_grad[0] == 0.0);
    CHECK(st.prev_update[0] == 0.0);
  }
}

TEST_CASE("zero previous or current gradient steps without resizing") {
  const RpropConfig cfg;
  RpropState st = init_rprop(2, cfg);
  std::vector<double> x{1.0, -1.0};
  std::vector<double> g{0.5, 0.0};
  rprop_step(x, g, 1.0, st, cfg);
  // Component 0: fresh state counts as s = 0, step at delta_init.
  CHECK(x[0] == doctest::Approx(1.0 - cfg.delta_init).epsilon(1e-15));
  CHECK(st.delta[0] == cfg.delta_init);
  // Component 1: sign(0) = 0, no move.
  CHECK(x[1] == -1.0);
  CHECK(st.prev_update[1] == 0.0);
}

TEST_CASE("the first sign flip after init can never revert") {
  // prev_loss starts at +inf, so even a huge finite loss is "not worse".
  const RpropConfig cfg;
  RpropState fresh = init_rprop(1, cfg);
  fresh.prev_grad[0] = 1.0;
  fresh.prev_update[0] = -0.1;
  std::vector<double> y{1.9};
  std::vector<double> gy{-1.0};
  rprop_step(y, gy, 1e300, fresh, cfg);
  CHECK(y[0] == 1.9);
}

TEST_CASE("step sizes stay inside the configured bounds") {
  RpropConfig cfg;
  cfg.delta_init = 0.1;
  RpropState st = init_rprop(1, cfg);
  std::vector<double> x{0.0};
  // Persistent agreement grows the step toward delta_max and never beyond.
  for (int i = 0; i < 100; ++i) {
    std::vector<double> g{1.0};
    rprop_step(x, g, 1.0, st, cfg);
    CHECK(st.delta[0] <= cfg.delta_max);
  }
  CHECK(st.delta[0] == doctest::Approx(cfg.delta_max));
  // Alternating signs with improving losses shrink toward delta_min.
  double loss = 1.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> g{i % 2 ? 1.0 : -1.0};
    loss *= 0.5;
    rprop_step(x, g, loss, st, cfg);
    CHECK(st.delta[0] >= cfg.delta_min);
  }
  CHECK(st.delta[0] == doctest::Approx(cfg.delta_min));
}

TEST_CASE("updates depend on gradient signs, not magnitudes") {
  const RpropConfig cfg;
  RpropState a = init_rprop(3, cfg);
  RpropState b = init_rprop(3, cfg);
  std::vector<double> xa{1.0, 2.0, 3.0};
  std::vector<double> xb{1.0, 2.0, 3.0};
  std::vector<double> losses{9.0, 5.0, 7.0, 3.0};
  std::vector<std::vector<double>> gs{{0.1, -2.0, 0.5},
                                      {-0.4, -0.1, 0.2},
                                      {0.3, 0.7, -0.9},
                                      {-0.2, 0.6, 0.1}};
  for (std::size_t i = 0; i < gs.size(); ++i) {
    std::vector<double> scaled = gs[i];
    for (double& v : scaled) v *= 1000.0;
    rprop_step(xa, gs[i], losses[i], a, cfg);
    rprop_step(xb, scaled, losses[i], b, cfg);
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(xa[k] == xb[k]);
    CHECK(a.delta[k] == b.delta[k]);
  }
}

TEST_CASE("a separable quadratic reaches 1e-6 within 200 steps") {
  const RpropConfig cfg;
  RpropState st = init_rprop(3, cfg);
  std::vector<double> x{10.0, -10.0, 3.0};
  int steps = 0;
  double f = 0.0;
  for (; steps < 200; ++steps) {
    f = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    if (f < 1e-6) break;
    std::vector<double> g{2 * x[0], 2 * x[1], 2 * x[2]};
    rprop_step(x, g, f, st, cfg);
  }
  CHECK(f < 1e-6);
  CHECK(steps < 200);
}

TEST_CASE("non-finite gradients are reported with the component index") {
  const RpropConfig cfg;
  RpropState st = init_rprop(2, cfg);
  std::vector<double> x{1.0, 1.0};
  std::vector<double> g{0.0, std::numeric_limits<double>::quiet_NaN()};
  try {
    rprop_step(x, g, 1.0, st, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numeric);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("mismatched spans are rejected") {
  const RpropConfig cfg;
  RpropState st = init_rprop(2, cfg);
  std::vector<double> x{1.0, 1.0};
  std::vector<double> g{1.0};
  CHECK_THROWS_AS(rprop_step(x, g, 1.0, st, cfg), Error);
}
