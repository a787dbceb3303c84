// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "observed.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

namespace dualmc {

enum class Dataset { synthetic, csv, ratings, image };
enum class ClampMode { automatic, on, off };
enum class BenchMethod { full, nonlinear_only, linear_only, als };
const char* bench_method_name(BenchMethod m);

/// Everything a run needs, settable through flat `key = value` pairs.
/// Defaults reproduce the reference synthetic setup.
struct ExperimentConfig {
  Dataset dataset = Dataset::synthetic;
  ModelConfig model;  // model.seed is the base seed; run i uses seed + i
  ClampMode clamp = ClampMode::automatic;
  int repeat = 10;
  std::string output_dir = "out";
  MaskSpec mask;

  SyntheticSpec synthetic;
  std::string csv_path;
  std::string csv_indicator;
  std::string ratings_path;
  char ratings_delimiter = '\t';
  double ratings_min = 1.0;
  double ratings_max = 5.0;
  std::string image_path;

  Index als_rank = 0;  // 0: follow `rank`
  int als_iters = 100;
  double als_ridge = 0.01;

  std::vector<double> bench_fractions = {0.3, 0.5, 0.7};
  std::vector<BenchMethod> bench_methods = {
      BenchMethod::full, BenchMethod::nonlinear_only,
      BenchMethod::linear_only, BenchMethod::als};
  std::vector<double> ablate_gammas = {0.01, 0.05, 0.1, 0.5, 1.0};
  std::vector<double> ablate_lambdas = {0.01};
  int gradcheck_instances = 20;
};

/// Applies one key=value pair; unknown keys and malformed values throw with
/// the key named.
void config_set(ExperimentConfig& cfg, const std::string& key,
                const std::string& value);

/// Line-oriented config file: `key = value`, '#' comments, blank lines
/// ignored.
ExperimentConfig config_load_file(const std::string& path);

/// Canonical echo of every key, alphabetically, one `key = value` per line.
/// Byte-stable for identical configs; embedded in the run manifest.
std::string config_dump(const ExperimentConfig& cfg);

/// Human-readable key reference: name, type, default, description.
std::string config_keys_help();

/// cfg.model with the clamp tri-state resolved against the dataset kind.
ModelConfig resolved_model_config(const ExperimentConfig& cfg);

enum class Subcommand { complete, synth_bench, inpaint, gradcheck, ablate };
Subcommand subcommand_from_string(const std::string& name);
const char* subcommand_name(Subcommand cmd);

/// Executes one subcommand: writes a manifest plus the subcommand's report
/// files under cfg.output_dir and prints a short summary to `out`. Returns
/// the process exit code (gradcheck: 0 iff the max relative error is within
/// tolerance). Errors are reported by throwing dualmc::Error.
int run_experiment(Subcommand cmd, const ExperimentConfig& cfg,
                   std::ostream& out, std::ostream& err);

}  // namespace dualmc
