// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Talks to the engine exclusively through the C API
// in dualmc.h.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualmc.h"

namespace {

struct ConfigHandle {
  dualmc_config* ptr = nullptr;
  ~ConfigHandle() { dualmc_config_destroy(ptr); }
};

int fail(const char* stage) {
  std::fprintf(stderr, "dualmc: %s: %s\n", stage, dualmc_last_error());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dualmc: matrix completion with a two-branch "
               "linear+nonlinear network"};
  app.require_subcommand(1);
  app.footer(std::string("Config keys (set via --config file or --set "
                         "key=value):\n") +
             dualmc_config_help());

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  std::string seed;

  app.add_option("-c,--config", config_path,
                 "config file with key = value lines");
  app.add_option("-s,--set", overrides,
                 "override one key, e.g. --set rank=10 (repeatable)");
  app.add_option("-o,--out", output_dir,
                 "output directory (also: DUALMC_OUTPUT_DIR)");
  app.add_option("--seed", seed, "base seed for this run");

  static const char* kSubcommands[] = {"complete", "synth-bench", "inpaint",
                                       "gradcheck", "ablate"};
  static const char* kDescriptions[] = {
      "train on one dataset and write the completed matrix plus metrics",
      "sweep mask fractions x seeds x methods on synthetic data",
      "reconstruct a masked image and report psnr/ssim",
      "compare analytic gradients against finite differences",
      "sweep the gamma/lambda grid and report the train/holdout gap"};
  for (std::size_t i = 0; i < 5; ++i)
    app.add_subcommand(kSubcommands[i], kDescriptions[i])->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  ConfigHandle cfg;
  if (!config_path.empty()) {
    if (dualmc_config_load(config_path.c_str(), &cfg.ptr) != DUALMC_OK)
      return fail("loading config");
  } else if (dualmc_config_create(&cfg.ptr) != DUALMC_OK) {
    return fail("creating config");
  }

  // Precedence, lowest to highest: file, DUALMC_OUTPUT_DIR, flags.
  if (const char* env = std::getenv("DUALMC_OUTPUT_DIR");
      env && *env != '\0') {
    if (dualmc_config_set(cfg.ptr, "output_dir", env) != DUALMC_OK)
      return fail("applying DUALMC_OUTPUT_DIR");
  }
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "dualmc: --set expects key=value, got '%s'\n",
                   item.c_str());
      return 2;
    }
    if (dualmc_config_set(cfg.ptr, item.substr(0, eq).c_str(),
                          item.substr(eq + 1).c_str()) != DUALMC_OK)
      return fail("applying --set");
  }
  if (!seed.empty() &&
      dualmc_config_set(cfg.ptr, "seed", seed.c_str()) != DUALMC_OK)
    return fail("applying --seed");
  if (!output_dir.empty() &&
      dualmc_config_set(cfg.ptr, "output_dir", output_dir.c_str()) !=
          DUALMC_OK)
    return fail("applying --out");

  int exit_code = 0;
  if (dualmc_run(subcommand.c_str(), cfg.ptr, &exit_code) != DUALMC_OK)
    return fail(subcommand.c_str());
  return exit_code;
}
