// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#include "experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "als.hpp"
#include "csv_io.hpp"
#include "error.hpp"
#include "gradcheck.hpp"
#include "metrics.hpp"
#include "pnm_io.hpp"
#include "ratings_io.hpp"
#include "rng.hpp"
#include "version.hpp"

namespace dualmc {

const char* bench_method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::full: return "full";
    case BenchMethod::nonlinear_only: return "nonlinear_only";
    case BenchMethod::linear_only: return "linear_only";
    case BenchMethod::als: return "als";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const char* expected,
                            const std::string& value) {
  throw Error(ErrorCode::parse, "config: key '" + key + "' expects " +
                                    expected + ", got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    bad_value(key, "a real number", value);
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    bad_value(key, "an integer", value);
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    bad_value(key, "a non-negative integer", value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  bad_value(key, "a boolean (true/false/on/off/1/0)", value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  if (trim(value).empty()) return items;
  std::string::size_type start = 0;
  while (true) {
    auto pos = value.find(',', start);
    if (pos == std::string::npos) {
      items.push_back(trim(value.substr(start)));
      break;
    }
    items.push_back(trim(value.substr(start, pos - start)));
    start = pos + 1;
  }
  return items;
}

std::vector<double> parse_real_list(const std::string& key,
                                    const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value))
    out.push_back(parse_real(key, item));
  return out;
}

std::vector<Index> parse_index_list(const std::string& key,
                                    const std::string& value) {
  std::vector<Index> out;
  for (const auto& item : split_list(value))
    out.push_back(static_cast<Index>(parse_int(key, item)));
  return out;
}

// -------------------------------------------------------------- rendering

std::string render_real(double v) { return format_double(v); }

std::string render_real_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string render_index_list(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

const char* render_bool(bool b) { return b ? "true" : "false"; }

const char* dataset_name(Dataset d) {
  switch (d) {
    case Dataset::synthetic: return "synthetic";
    case Dataset::csv: return "csv";
    case Dataset::ratings: return "ratings";
    case Dataset::image: return "image";
  }
  return "?";
}

const char* clamp_name(ClampMode c) {
  switch (c) {
    case ClampMode::automatic: return "auto";
    case ClampMode::on: return "on";
    case ClampMode::off: return "off";
  }
  return "?";
}

// ------------------------------------------------------------- key table

struct KeyDef {
  const char* key;
  const char* type;
  const char* doc;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      {"dataset", "string",
       "data source: synthetic | csv | ratings | image",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "synthetic") c.dataset = Dataset::synthetic;
         else if (v == "csv") c.dataset = Dataset::csv;
         else if (v == "ratings") c.dataset = Dataset::ratings;
         else if (v == "image") c.dataset = Dataset::image;
         else bad_value("dataset", "synthetic|csv|ratings|image", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(dataset_name(c.dataset));
       }},
      {"rank", "int", "latent dimension r (first width of both branches)",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.rank = static_cast<Index>(parse_int("rank", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.model.rank); }},
      {"col_hidden", "list(int)",
       "hidden widths of the column branch, between rank and m",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.col_hidden = parse_index_list("col_hidden", v);
       },
       [](const ExperimentConfig& c) {
         return render_index_list(c.model.col_hidden);
       }},
      {"row_hidden", "list(int)",
       "hidden widths of the row branch, between rank and n",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.row_hidden = parse_index_list("row_hidden", v);
       },
       [](const ExperimentConfig& c) {
         return render_index_list(c.model.row_hidden);
       }},
      {"activation", "string", "layer nonlinearity: sigmoid | tanh | relu",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.activation = activation_from_string(v);
       },
       [](const ExperimentConfig& c) {
         return std::string(activation_name(c.model.activation));
       }},
      {"alpha", "real", "weight of the column reconstruction loss",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.hp.alpha = parse_real("alpha", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.model.hp.alpha); }},
      {"beta", "real", "weight of the row reconstruction loss",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.hp.beta = parse_real("beta", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.model.hp.beta); }},
      {"gamma", "real", "weight of the factorization (weight-product) loss",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.hp.gamma = parse_real("gamma", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.model.hp.gamma); }},
      {"lambda", "real", "weight of the decay regularizer",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.hp.lambda = parse_real("lambda", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.hp.lambda);
       }},
      {"max_iters", "int", "optimizer iteration budget per run",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.max_iters = static_cast<int>(parse_int("max_iters", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.max_iters);
       }},
      {"prediction", "string",
       "reconstruction source: column | row | average",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.prediction = prediction_from_string(v);
       },
       [](const ExperimentConfig& c) {
         return std::string(prediction_name(c.model.prediction));
       }},
      {"clamp_observed", "string",
       "reset observed entries after prediction: auto | on | off "
       "(auto: on except for ratings)",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "auto") c.clamp = ClampMode::automatic;
         else if (v == "on" || v == "true") c.clamp = ClampMode::on;
         else if (v == "off" || v == "false") c.clamp = ClampMode::off;
         else bad_value("clamp_observed", "auto|on|off", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(clamp_name(c.clamp));
       }},
      {"disable_linear_path", "bool",
       "ablation: drop the affine path (nonlinear-only model)",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.disable_linear_path = parse_bool("disable_linear_path", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(render_bool(c.model.disable_linear_path));
       }},
      {"disable_nonlinear_path", "bool",
       "ablation: drop the activated path (affine-only model)",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.disable_nonlinear_path =
             parse_bool("disable_nonlinear_path", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(render_bool(c.model.disable_nonlinear_path));
       }},
      {"seed", "uint", "base seed; run i uses seed + i",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.seed = parse_u64("seed", v);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.model.seed); }},
      {"repeat", "int", "number of seeded runs to aggregate over",
       [](ExperimentConfig& c, const std::string& v) {
         const long long n = parse_int("repeat", v);
         if (n < 1) bad_value("repeat", "an integer >= 1", v);
         c.repeat = static_cast<int>(n);
       },
       [](const ExperimentConfig& c) { return std::to_string(c.repeat); }},
      {"output_dir", "string", "directory for reports and the manifest",
       [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
       [](const ExperimentConfig& c) { return c.output_dir; }},
      {"early_stop.enabled", "bool",
       "hold out a slice of observed entries and stop on stagnation",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.early_stop.enabled = parse_bool("early_stop.enabled", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(render_bool(c.model.early_stop.enabled));
       }},
      {"early_stop.fraction", "real",
       "fraction of observed entries held out for validation",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.early_stop.fraction = parse_real("early_stop.fraction", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.early_stop.fraction);
       }},
      {"early_stop.patience", "int",
       "iterations without improvement before stopping",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.early_stop.patience =
             static_cast<int>(parse_int("early_stop.patience", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.model.early_stop.patience);
       }},
      {"early_stop.min_delta", "real",
       "minimum holdout improvement that counts",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.early_stop.min_delta = parse_real("early_stop.min_delta", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.early_stop.min_delta);
       }},
      {"early_stop.select_best", "bool",
       "return the best-on-holdout state instead of the final one",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.early_stop.select_best =
             parse_bool("early_stop.select_best", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(render_bool(c.model.early_stop.select_best));
       }},
      {"rprop.eta_plus", "real", "step growth factor on sign agreement",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.rprop.eta_plus = parse_real("rprop.eta_plus", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.rprop.eta_plus);
       }},
      {"rprop.eta_minus", "real", "step shrink factor on sign flip",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.rprop.eta_minus = parse_real("rprop.eta_minus", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.rprop.eta_minus);
       }},
      {"rprop.delta_init", "real", "initial per-parameter step size",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.rprop.delta_init = parse_real("rprop.delta_init", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.rprop.delta_init);
       }},
      {"rprop.delta_min", "real", "lower bound on step sizes",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.rprop.delta_min = parse_real("rprop.delta_min", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.rprop.delta_min);
       }},
      {"rprop.delta_max", "real", "upper bound on step sizes",
       [](ExperimentConfig& c, const std::string& v) {
         c.model.rprop.delta_max = parse_real("rprop.delta_max", v);
       },
       [](const ExperimentConfig& c) {
         return render_real(c.model.rprop.delta_max);
       }},
      {"mask.kind", "string",
       "how entries are hidden: none | random | block | image",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "none") c.mask.kind = MaskSpec::Kind::none;
         else if (v == "random") c.mask.kind = MaskSpec::Kind::random;
         else if (v == "block") c.mask.kind = MaskSpec::Kind::block;
         else if (v == "image") c.mask.kind = MaskSpec::Kind::image;
         else bad_value("mask.kind", "none|random|block|image", v);
       },
       [](const ExperimentConfig& c) {
         return std::string(MaskSpec::kind_name(c.mask.kind));
       }},
      {"mask.fraction", "real",
       "random mask: fraction of entries hidden (ratings: fraction of "
       "observed ratings held out as test)",
       [](ExperimentConfig& c, const std::string& v) {
         c.mask.fraction = parse_real("mask.fraction", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.mask.fraction); }},
      {"mask.top", "int", "block mask: first hidden row",
       [](ExperimentConfig& c, const std::string& v) {
         c.mask.top = static_cast<Index>(parse_int("mask.top", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.mask.top); }},
      {"mask.left", "int", "block mask: first hidden column",
       [](ExperimentConfig& c, const std::string& v) {
         c.mask.left = static_cast<Index>(parse_int("mask.left", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.mask.left); }},
      {"mask.height", "int", "block mask: number of hidden rows",
       [](ExperimentConfig& c, const std::string& v) {
         c.mask.height = static_cast<Index>(parse_int("mask.height", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.mask.height);
       }},
      {"mask.width", "int", "block mask: number of hidden columns",
       [](ExperimentConfig& c, const std::string& v) {
         c.mask.width = static_cast<Index>(parse_int("mask.width", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.mask.width); }},
      {"mask.image", "string",
       "image mask: PGM whose nonzero pixels are hidden",
       [](ExperimentConfig& c, const std::string& v) {
         c.mask.image_path = v;
       },
       [](const ExperimentConfig& c) { return c.mask.image_path; }},
      {"synthetic.m", "int", "synthetic dataset: rows",
       [](ExperimentConfig& c, const std::string& v) {
         c.synthetic.m = static_cast<Index>(parse_int("synthetic.m", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.synthetic.m); }},
      {"synthetic.n", "int", "synthetic dataset: columns",
       [](ExperimentConfig& c, const std::string& v) {
         c.synthetic.n = static_cast<Index>(parse_int("synthetic.n", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.synthetic.n); }},
      {"synthetic.rank", "int", "synthetic dataset: rank of the core product",
       [](ExperimentConfig& c, const std::string& v) {
         c.synthetic.r = static_cast<Index>(parse_int("synthetic.rank", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.synthetic.r); }},
      {"csv.path", "string", "csv dataset: complete ground-truth matrix",
       [](ExperimentConfig& c, const std::string& v) { c.csv_path = v; },
       [](const ExperimentConfig& c) { return c.csv_path; }},
      {"csv.indicator", "string",
       "csv dataset: optional 0/1 matrix marking observed entries",
       [](ExperimentConfig& c, const std::string& v) { c.csv_indicator = v; },
       [](const ExperimentConfig& c) { return c.csv_indicator; }},
      {"ratings.path", "string",
       "ratings dataset: user item rating triplet file",
       [](ExperimentConfig& c, const std::string& v) { c.ratings_path = v; },
       [](const ExperimentConfig& c) { return c.ratings_path; }},
      {"ratings.delimiter", "string",
       "triplet field separator: a single character or 'tab'",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "tab" || v == "\\t") c.ratings_delimiter = '\t';
         else if (v.size() == 1) c.ratings_delimiter = v[0];
         else bad_value("ratings.delimiter", "one character or 'tab'", v);
       },
       [](const ExperimentConfig& c) {
         return c.ratings_delimiter == '\t'
                    ? std::string("tab")
                    : std::string(1, c.ratings_delimiter);
       }},
      {"ratings.min", "real", "lowest legal rating",
       [](ExperimentConfig& c, const std::string& v) {
         c.ratings_min = parse_real("ratings.min", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.ratings_min); }},
      {"ratings.max", "real", "highest legal rating",
       [](ExperimentConfig& c, const std::string& v) {
         c.ratings_max = parse_real("ratings.max", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.ratings_max); }},
      {"image.path", "string", "image dataset: 8-bit PGM (P5) or PPM (P6)",
       [](ExperimentConfig& c, const std::string& v) { c.image_path = v; },
       [](const ExperimentConfig& c) { return c.image_path; }},
      {"als.rank", "int", "baseline factor rank (0: follow 'rank')",
       [](ExperimentConfig& c, const std::string& v) {
         c.als_rank = static_cast<Index>(parse_int("als.rank", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.als_rank); }},
      {"als.iters", "int", "baseline alternation count",
       [](ExperimentConfig& c, const std::string& v) {
         c.als_iters = static_cast<int>(parse_int("als.iters", v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.als_iters); }},
      {"als.ridge", "real", "baseline ridge strength",
       [](ExperimentConfig& c, const std::string& v) {
         c.als_ridge = parse_real("als.ridge", v);
       },
       [](const ExperimentConfig& c) { return render_real(c.als_ridge); }},
      {"bench.fractions", "list(real)",
       "synth-bench: hidden fractions to sweep",
       [](ExperimentConfig& c, const std::string& v) {
         c.bench_fractions = parse_real_list("bench.fractions", v);
       },
       [](const ExperimentConfig& c) {
         return render_real_list(c.bench_fractions);
       }},
      {"bench.methods", "list(string)",
       "synth-bench: full | nonlinear_only | linear_only | als",
       [](ExperimentConfig& c, const std::string& v) {
         std::vector<BenchMethod> methods;
         for (const auto& item : split_list(v)) {
           if (item == "full") methods.push_back(BenchMethod::full);
           else if (item == "nonlinear_only")
             methods.push_back(BenchMethod::nonlinear_only);
           else if (item == "linear_only")
             methods.push_back(BenchMethod::linear_only);
           else if (item == "als") methods.push_back(BenchMethod::als);
           else bad_value("bench.methods",
                          "full|nonlinear_only|linear_only|als", item);
         }
         c.bench_methods = std::move(methods);
       },
       [](const ExperimentConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.bench_methods.size(); ++i) {
           if (i) out += ',';
           out += bench_method_name(c.bench_methods[i]);
         }
         return out;
       }},
      {"ablate.gammas", "list(real)", "ablate: factorization-loss weights",
       [](ExperimentConfig& c, const std::string& v) {
         c.ablate_gammas = parse_real_list("ablate.gammas", v);
       },
       [](const ExperimentConfig& c) {
         return render_real_list(c.ablate_gammas);
       }},
      {"ablate.lambdas", "list(real)", "ablate: decay weights",
       [](ExperimentConfig& c, const std::string& v) {
         c.ablate_lambdas = parse_real_list("ablate.lambdas", v);
       },
       [](const ExperimentConfig& c) {
         return render_real_list(c.ablate_lambdas);
       }},
      {"gradcheck.instances", "int",
       "gradcheck: number of random instances",
       [](ExperimentConfig& c, const std::string& v) {
         c.gradcheck_instances =
             static_cast<int>(parse_int("gradcheck.instances", v));
       },
       [](const ExperimentConfig& c) {
         return std::to_string(c.gradcheck_instances);
       }},
  };
  return table;
}

const KeyDef* find_key(const std::string& key) {
  for (const auto& def : key_table())
    if (key == def.key) return &def;
  return nullptr;
}

}  // namespace

void config_set(ExperimentConfig& cfg, const std::string& key,
                const std::string& value) {
  const KeyDef* def = find_key(key);
  require(def != nullptr, ErrorCode::unknown_key,
          "config: unknown key '" + key + "'");
  def->set(cfg, value);
}

ExperimentConfig config_load_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
    try {
      config_set(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(),
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::string config_dump(const ExperimentConfig& cfg) {
  std::vector<const KeyDef*> defs;
  for (const auto& def : key_table()) defs.push_back(&def);
  std::sort(defs.begin(), defs.end(), [](const KeyDef* a, const KeyDef* b) {
    return std::string_view(a->key) < std::string_view(b->key);
  });
  std::string out;
  for (const KeyDef* def : defs) {
    out += def->key;
    out += " = ";
    out += def->get(cfg);
    out += '\n';
  }
  return out;
}

std::string config_keys_help() {
  ExperimentConfig defaults;
  std::vector<const KeyDef*> defs;
  for (const auto& def : key_table()) defs.push_back(&def);
  std::sort(defs.begin(), defs.end(), [](const KeyDef* a, const KeyDef* b) {
    return std::string_view(a->key) < std::string_view(b->key);
  });
  std::ostringstream out;
  for (const KeyDef* def : defs) {
    out << "  " << def->key << " (" << def->type << ", default: ";
    const std::string d = def->get(defaults);
    out << (d.empty() ? "<empty>" : d) << ")\n      " << def->doc << "\n";
  }
  return out.str();
}

ModelConfig resolved_model_config(const ExperimentConfig& cfg) {
  ModelConfig mc = cfg.model;
  switch (cfg.clamp) {
    case ClampMode::on: mc.clamp_observed = true; break;
    case ClampMode::off: mc.clamp_observed = false; break;
    case ClampMode::automatic:
      mc.clamp_observed = cfg.dataset != Dataset::ratings;
      break;
  }
  return mc;
}

Subcommand subcommand_from_string(const std::string& name) {
  if (name == "complete") return Subcommand::complete;
  if (name == "synth-bench") return Subcommand::synth_bench;
  if (name == "inpaint") return Subcommand::inpaint;
  if (name == "gradcheck") return Subcommand::gradcheck;
  if (name == "ablate") return Subcommand::ablate;
  throw Error(ErrorCode::invalid_argument,
              "unknown subcommand: " + name +
                  " (expected complete, synth-bench, inpaint, gradcheck or "
                  "ablate)");
}

const char* subcommand_name(Subcommand cmd) {
  switch (cmd) {
    case Subcommand::complete: return "complete";
    case Subcommand::synth_bench: return "synth-bench";
    case Subcommand::inpaint: return "inpaint";
    case Subcommand::gradcheck: return "gradcheck";
    case Subcommand::ablate: return "ablate";
  }
  return "?";
}

// ------------------------------------------------------------ run support

namespace {

namespace fs = std::filesystem;

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_manifest(const std::string& dir, Subcommand cmd,
                    const ExperimentConfig& cfg) {
  std::ofstream out(join_path(dir, "manifest.txt"));
  require(out.good(), ErrorCode::io, "cannot write manifest in " + dir);
  out << "dualmc " << kVersion << '\n'
      << "subcommand " << subcommand_name(cmd) << '\n'
      << config_dump(cfg);
  require(out.good(), ErrorCode::io, "manifest write failed in " + dir);
}

bool resolve_clamp(const ExperimentConfig& cfg) {
  switch (cfg.clamp) {
    case ClampMode::on: return true;
    case ClampMode::off: return false;
    case ClampMode::automatic: return cfg.dataset != Dataset::ratings;
  }
  return true;
}

/// One run's data: what the model sees and what metrics are judged against.
struct RunData {
  ObservedMatrix observed;
  Matrix truth;       // reference values (ratings: the full rating matrix)
  bool truth_known = false;  // full-matrix metrics are meaningful
  Matrix hidden_mask;        // 1 where hidden-entry metrics are evaluated
  double realized_fraction = 0.0;
  std::string mask_kind;
  double nmae_min = 0.0;
  double nmae_max = 0.0;
  bool color = false;
  Index channel_cols = 0;  // per-channel width before unfolding
};

char peek_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open image: " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  require(in.gcount() == 2 && magic[0] == 'P', ErrorCode::parse,
          "not a binary netpbm file: " + path);
  return magic[1];
}

Matrix observed_indicator_for(const ExperimentConfig& cfg, Index rows,
                              Index cols, std::uint64_t run_seed,
                              const RunData& data) {
  MaskSpec spec = cfg.mask;
  spec.seed = derive_seed(run_seed, stream::mask);
  if (spec.kind == MaskSpec::Kind::image && data.color) {
    const Matrix img = load_pgm(spec.image_path);
    if (img.rows() == rows && img.cols() == data.channel_cols) {
      // Per-channel mask: hide the same pixels in each unfolded channel.
      Matrix channel = Matrix::Ones(rows, data.channel_cols);
      for (Index j = 0; j < data.channel_cols; ++j)
        for (Index i = 0; i < rows; ++i)
          if (img(i, j) != 0.0) channel(i, j) = 0.0;
      Matrix indicator(rows, cols);
      for (int k = 0; k < 3; ++k)
        indicator.block(0, k * data.channel_cols, rows, data.channel_cols) =
            channel;
      return indicator;
    }
  }
  return generate_mask(rows, cols, spec);
}

RunData build_run_data(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  RunData data;
  data.mask_kind = MaskSpec::kind_name(cfg.mask.kind);
  switch (cfg.dataset) {
    case Dataset::synthetic: {
      SyntheticSpec spec = cfg.synthetic;
      spec.seed = run_seed;
      data.truth = gen_synthetic(spec);
      data.truth_known = true;
      break;
    }
    case Dataset::csv: {
      require(!cfg.csv_path.empty(), ErrorCode::invalid_argument,
              "dataset = csv needs csv.path");
      data.truth = load_dense_csv(cfg.csv_path);
      data.truth_known = true;
      break;
    }
    case Dataset::image: {
      require(!cfg.image_path.empty(), ErrorCode::invalid_argument,
              "dataset = image needs image.path");
      if (std::filesystem::is_directory(cfg.image_path)) {
        // A directory of same-size grayscale images, one per column.
        data.truth = stack_pgm_directory(cfg.image_path);
        data.truth_known = true;
        break;
      }
      const char magic = peek_magic(cfg.image_path);
      if (magic == '5') {
        data.truth = load_pgm(cfg.image_path);
      } else if (magic == '6') {
        RgbImage img = load_ppm(cfg.image_path);
        data.channel_cols = img.r.cols();
        data.color = true;
        data.truth = unfold_rgb(img);
      } else {
        throw Error(ErrorCode::parse,
                    "unsupported netpbm magic P" + std::string(1, magic) +
                        " in " + cfg.image_path);
      }
      data.truth_known = true;
      break;
    }
    case Dataset::ratings: {
      require(!cfg.ratings_path.empty(), ErrorCode::invalid_argument,
              "dataset = ratings needs ratings.path");
      auto [full, table] = load_ratings(cfg.ratings_path,
                                        cfg.ratings_delimiter,
                                        cfg.ratings_min, cfg.ratings_max);
      data.truth = full.values;
      data.truth_known = false;  // unobserved cells have no ground truth
      data.nmae_min = cfg.ratings_min;
      data.nmae_max = cfg.ratings_max;
      const double observed_total = full.indicator.sum();
      if (cfg.mask.kind == MaskSpec::Kind::none) {
        data.observed = std::move(full);
        data.hidden_mask = Matrix::Zero(data.truth.rows(), data.truth.cols());
        data.realized_fraction = 0.0;
      } else if (cfg.mask.kind == MaskSpec::Kind::random) {
        HoldoutSplit split = split_holdout(
            full, cfg.mask.fraction, derive_seed(run_seed, stream::mask));
        data.hidden_mask = split.holdout.indicator;
        data.observed = std::move(split.train);
        data.realized_fraction = data.hidden_mask.sum() / observed_total;
      } else {
        const Matrix keep = observed_indicator_for(
            cfg, full.rows(), full.cols(), run_seed, data);
        data.hidden_mask =
            full.indicator.cwiseProduct(Matrix::Ones(full.rows(),
                                                     full.cols()) -
                                        keep);
        data.observed =
            build_observed(full.values, full.indicator.cwiseProduct(keep));
        data.realized_fraction = data.hidden_mask.sum() / observed_total;
      }
      return data;
    }
  }

  // Common tail for sources with a complete reference matrix.
  const Index rows = data.truth.rows();
  const Index cols = data.truth.cols();
  Matrix indicator;
  if (cfg.dataset == Dataset::csv && !cfg.csv_indicator.empty()) {
    indicator = load_dense_csv(cfg.csv_indicator);
    require(indicator.rows() == rows && indicator.cols() == cols,
            ErrorCode::shape_mismatch,
            "csv.indicator shape does not match csv.path");
    if (cfg.mask.kind != MaskSpec::Kind::none)
      indicator = indicator.cwiseProduct(
          observed_indicator_for(cfg, rows, cols, run_seed, data));
  } else {
    indicator = observed_indicator_for(cfg, rows, cols, run_seed, data);
  }
  data.observed = build_observed(data.truth, indicator);
  data.hidden_mask = Matrix::Ones(rows, cols) - indicator;
  data.realized_fraction =
      data.hidden_mask.sum() / static_cast<double>(rows * cols);
  data.nmae_min = data.truth.minCoeff();
  data.nmae_max = data.truth.maxCoeff();
  return data;
}

struct MetricRow {
  std::uint64_t seed = 0;
  std::string mask_kind;
  double mask_fraction = 0.0;
  std::string evaluated_on;
  double psnr_v = 0.0;
  double ssim_v = 0.0;
  bool has_nmae = false;
  double nmae_v = 0.0;
};

void append_metric_rows(std::vector<MetricRow>& rows, const RunData& data,
                        const Matrix& completed, std::uint64_t run_seed) {
  const bool bounds_ok = data.nmae_max > data.nmae_min;
  if (data.hidden_mask.size() > 0 && data.hidden_mask.sum() > 0.0) {
    MetricRow row;
    row.seed = run_seed;
    row.mask_kind = data.mask_kind;
    row.mask_fraction = data.realized_fraction;
    row.evaluated_on = "hidden-only";
    row.psnr_v = psnr_masked(data.truth, completed, data.hidden_mask);
    row.ssim_v = ssim_masked(data.truth, completed, data.hidden_mask);
    if (bounds_ok) {
      row.has_nmae = true;
      row.nmae_v = nmae(data.truth, completed, data.hidden_mask,
                        data.nmae_min, data.nmae_max);
    }
    rows.push_back(std::move(row));
  }
  if (data.truth_known) {
    MetricRow row;
    row.seed = run_seed;
    row.mask_kind = data.mask_kind;
    row.mask_fraction = data.realized_fraction;
    row.evaluated_on = "full";
    row.psnr_v = psnr(data.truth, completed);
    row.ssim_v = ssim(data.truth, completed);
    if (bounds_ok) {
      row.has_nmae = true;
      row.nmae_v = nmae(data.truth, completed,
                        Matrix::Ones(data.truth.rows(), data.truth.cols()),
                        data.nmae_min, data.nmae_max);
    }
    rows.push_back(std::move(row));
  }
}

void write_metric_rows(const std::string& path,
                       const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + path);
  out << "seed,mask_kind,mask_fraction,evaluated_on,psnr,ssim,nmae\n";
  for (const auto& row : rows) {
    out << row.seed << ',' << row.mask_kind << ','
        << format_double(row.mask_fraction) << ',' << row.evaluated_on << ','
        << format_double(row.psnr_v) << ',' << format_double(row.ssim_v)
        << ',';
    if (row.has_nmae) out << format_double(row.nmae_v);
    out << '\n';
  }
  require(out.good(), ErrorCode::io, "write failed: " + path);
}

ModelConfig model_config_for_run(const ExperimentConfig& cfg,
                                 std::uint64_t run_seed) {
  ModelConfig mc = resolved_model_config(cfg);
  mc.seed = run_seed;
  return mc;
}

void print_warnings(std::ostream& err,
                    const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// ------------------------------------------------------------ subcommands

int run_complete(const ExperimentConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  std::vector<MetricRow> rows;
  for (int run = 0; run < cfg.repeat; ++run) {
    const std::uint64_t run_seed = cfg.model.seed + static_cast<std::uint64_t>(run);
    RunData data = build_run_data(cfg, run_seed);
    CompletionResult result =
        complete(data.observed, model_config_for_run(cfg, run_seed));
    print_warnings(err, result.warnings);
    if (run == 0) {
      save_dense_csv(result.completed, join_path(cfg.output_dir,
                                                 "completed.csv"));
      write_history_csv(join_path(cfg.output_dir, "history.csv"),
                        result.loss_history, result.val_history);
    }
    append_metric_rows(rows, data, result.completed, run_seed);
  }
  write_metric_rows(join_path(cfg.output_dir, "metrics.csv"), rows);
  out << "complete: wrote " << join_path(cfg.output_dir, "completed.csv")
      << ", history.csv, metrics.csv (" << rows.size() << " rows)\n";
  return 0;
}

int run_inpaint(const ExperimentConfig& cfg, std::ostream& out,
                std::ostream& err) {
  require(cfg.dataset == Dataset::image, ErrorCode::invalid_argument,
          "inpaint needs dataset = image");
  std::vector<MetricRow> rows;
  for (int run = 0; run < cfg.repeat; ++run) {
    const std::uint64_t run_seed = cfg.model.seed + static_cast<std::uint64_t>(run);
    RunData data = build_run_data(cfg, run_seed);
    CompletionResult result =
        complete(data.observed, model_config_for_run(cfg, run_seed));
    print_warnings(err, result.warnings);
    if (run == 0) {
      if (data.color) {
        save_ppm(refold_rgb(result.completed),
                 join_path(cfg.output_dir, "completed.ppm"));
      } else {
        save_pgm(result.completed, join_path(cfg.output_dir,
                                             "completed.pgm"));
      }
      write_history_csv(join_path(cfg.output_dir, "history.csv"),
                        result.loss_history, result.val_history);
    }
    append_metric_rows(rows, data, result.completed, run_seed);
  }
  write_metric_rows(join_path(cfg.output_dir, "metrics.csv"), rows);
  for (const auto& row : rows)
    out << "inpaint seed=" << row.seed << " " << row.evaluated_on
        << ": psnr=" << format_double(row.psnr_v)
        << " ssim=" << format_double(row.ssim_v) << '\n';
  return 0;
}

struct BenchRow {
  double fraction = 0.0;
  std::string method;
  std::uint64_t seed = 0;
  double psnr_hidden = 0.0, ssim_hidden = 0.0, nmae_hidden = 0.0;
  double psnr_full = 0.0, ssim_full = 0.0, nmae_full = 0.0;
};

int run_synth_bench(const ExperimentConfig& cfg, std::ostream& out,
                    std::ostream& err) {
  require(cfg.dataset == Dataset::synthetic, ErrorCode::invalid_argument,
          "synth-bench needs dataset = synthetic");
  require(!cfg.bench_fractions.empty() && !cfg.bench_methods.empty(),
          ErrorCode::invalid_argument,
          "synth-bench needs nonempty bench.fractions and bench.methods");
  const bool clamp = resolve_clamp(cfg);

  std::vector<BenchRow> rows;
  for (double fraction : cfg.bench_fractions) {
    for (int run = 0; run < cfg.repeat; ++run) {
      const std::uint64_t run_seed = cfg.model.seed + static_cast<std::uint64_t>(run);
      SyntheticSpec spec = cfg.synthetic;
      spec.seed = run_seed;
      const Matrix truth = gen_synthetic(spec);
      MaskSpec mask;
      mask.kind = MaskSpec::Kind::random;
      mask.fraction = fraction;
      mask.seed = derive_seed(run_seed, stream::mask);
      const Matrix indicator =
          generate_mask(truth.rows(), truth.cols(), mask);
      const ObservedMatrix observed = build_observed(truth, indicator);
      const Matrix hidden =
          Matrix::Ones(truth.rows(), truth.cols()) - indicator;
      const double y_min = truth.minCoeff();
      const double y_max = truth.maxCoeff();

      for (BenchMethod method : cfg.bench_methods) {
        Matrix completed;
        if (method == BenchMethod::als) {
          completed = als_complete(
              observed, cfg.als_rank > 0 ? cfg.als_rank : cfg.model.rank,
              cfg.als_iters, cfg.als_ridge, run_seed);
        } else {
          ModelConfig mc = model_config_for_run(cfg, run_seed);
          mc.disable_linear_path = method == BenchMethod::nonlinear_only;
          mc.disable_nonlinear_path = method == BenchMethod::linear_only;
          CompletionResult result = dualmc::complete(observed, mc);
          print_warnings(err, result.warnings);
          completed = std::move(result.completed);
        }
        if (clamp)
          completed = observed.indicator.cwiseProduct(observed.values) +
                      (Matrix::Ones(truth.rows(), truth.cols()) -
                       observed.indicator)
                          .cwiseProduct(completed);
        BenchRow row;
        row.fraction = fraction;
        row.method = bench_method_name(method);
        row.seed = run_seed;
        row.psnr_hidden = psnr_masked(truth, completed, hidden);
        row.ssim_hidden = ssim_masked(truth, completed, hidden);
        row.nmae_hidden = nmae(truth, completed, hidden, y_min, y_max);
        row.psnr_full = psnr(truth, completed);
        row.ssim_full = ssim(truth, completed);
        row.nmae_full =
            nmae(truth, completed,
                 Matrix::Ones(truth.rows(), truth.cols()), y_min, y_max);
        rows.push_back(std::move(row));
      }
    }
  }

  std::sort(rows.begin(), rows.end(),
            [](const BenchRow& a, const BenchRow& b) {
              if (a.fraction != b.fraction) return a.fraction < b.fraction;
              if (a.method != b.method) return a.method < b.method;
              return a.seed < b.seed;
            });
  {
    std::ofstream file(join_path(cfg.output_dir, "bench.csv"));
    require(file.good(), ErrorCode::io, "cannot write bench.csv");
    file << "mask_fraction,method,seed,psnr_hidden,ssim_hidden,nmae_hidden,"
            "psnr_full,ssim_full,nmae_full\n";
    for (const auto& r : rows)
      file << format_double(r.fraction) << ',' << r.method << ',' << r.seed
           << ',' << format_double(r.psnr_hidden) << ','
           << format_double(r.ssim_hidden) << ','
           << format_double(r.nmae_hidden) << ','
           << format_double(r.psnr_full) << ',' << format_double(r.ssim_full)
           << ',' << format_double(r.nmae_full) << '\n';
    require(file.good(), ErrorCode::io, "write failed: bench.csv");
  }
  {
    std::ofstream file(join_path(cfg.output_dir, "bench_summary.csv"));
    require(file.good(), ErrorCode::io, "cannot write bench_summary.csv");
    file << "mask_fraction,method,runs,psnr_hidden,ssim_hidden,nmae_hidden,"
            "psnr_full,ssim_full,nmae_full\n";
    for (std::size_t i = 0; i < rows.size();) {
      std::size_t j = i;
      BenchRow mean;
      mean.fraction = rows[i].fraction;
      mean.method = rows[i].method;
      while (j < rows.size() && rows[j].fraction == mean.fraction &&
             rows[j].method == mean.method) {
        mean.psnr_hidden += rows[j].psnr_hidden;
        mean.ssim_hidden += rows[j].ssim_hidden;
        mean.nmae_hidden += rows[j].nmae_hidden;
        mean.psnr_full += rows[j].psnr_full;
        mean.ssim_full += rows[j].ssim_full;
        mean.nmae_full += rows[j].nmae_full;
        ++j;
      }
      const double count = static_cast<double>(j - i);
      file << format_double(mean.fraction) << ',' << mean.method << ','
           << (j - i) << ',' << format_double(mean.psnr_hidden / count) << ','
           << format_double(mean.ssim_hidden / count) << ','
           << format_double(mean.nmae_hidden / count) << ','
           << format_double(mean.psnr_full / count) << ','
           << format_double(mean.ssim_full / count) << ','
           << format_double(mean.nmae_full / count) << '\n';
      out << "bench fraction=" << format_double(mean.fraction)
          << " method=" << mean.method
          << " mean_psnr_hidden=" << format_double(mean.psnr_hidden / count)
          << '\n';
      i = j;
    }
    require(file.good(), ErrorCode::io, "write failed: bench_summary.csv");
  }
  return 0;
}

int run_ablate(const ExperimentConfig& cfg, std::ostream& out,
               std::ostream& err) {
  require(!cfg.ablate_gammas.empty() && !cfg.ablate_lambdas.empty(),
          ErrorCode::invalid_argument,
          "ablate needs nonempty ablate.gammas and ablate.lambdas");
  struct AblateRow {
    double gamma, lambda;
    std::uint64_t seed;
    double train_mse, holdout_mse, gap;
  };
  std::vector<AblateRow> runs;
  for (double gamma : cfg.ablate_gammas) {
    for (double lambda : cfg.ablate_lambdas) {
      for (int run = 0; run < cfg.repeat; ++run) {
        const std::uint64_t run_seed = cfg.model.seed + static_cast<std::uint64_t>(run);
        RunData data = build_run_data(cfg, run_seed);
        ModelConfig mc = model_config_for_run(cfg, run_seed);
        mc.hp.gamma = gamma;
        mc.hp.lambda = lambda;
        mc.early_stop.enabled = true;  // the gap needs a holdout slice
        FitResult fr = fit(data.observed, mc);
        print_warnings(err, fr.warnings);
        runs.push_back({gamma, lambda, run_seed, fr.train_metric,
                        fr.holdout_metric,
                        fr.holdout_metric - fr.train_metric});
      }
    }
  }
  std::sort(runs.begin(), runs.end(),
            [](const AblateRow& a, const AblateRow& b) {
              if (a.gamma != b.gamma) return a.gamma < b.gamma;
              if (a.lambda != b.lambda) return a.lambda < b.lambda;
              return a.seed < b.seed;
            });
  {
    std::ofstream file(join_path(cfg.output_dir, "ablate_runs.csv"));
    require(file.good(), ErrorCode::io, "cannot write ablate_runs.csv");
    file << "gamma,lambda,seed,train_mse,holdout_mse,gap\n";
    for (const auto& r : runs)
      file << format_double(r.gamma) << ',' << format_double(r.lambda) << ','
           << r.seed << ',' << format_double(r.train_mse) << ','
           << format_double(r.holdout_mse) << ',' << format_double(r.gap)
           << '\n';
    require(file.good(), ErrorCode::io, "write failed: ablate_runs.csv");
  }
  {
    std::ofstream file(join_path(cfg.output_dir, "ablate.csv"));
    require(file.good(), ErrorCode::io, "cannot write ablate.csv");
    file << "gamma,lambda,runs,train_mse,holdout_mse,gap\n";
    for (std::size_t i = 0; i < runs.size();) {
      std::size_t j = i;
      double train = 0.0, holdout = 0.0, gap = 0.0;
      while (j < runs.size() && runs[j].gamma == runs[i].gamma &&
             runs[j].lambda == runs[i].lambda) {
        train += runs[j].train_mse;
        holdout += runs[j].holdout_mse;
        gap += runs[j].gap;
        ++j;
      }
      const double count = static_cast<double>(j - i);
      file << format_double(runs[i].gamma) << ','
           << format_double(runs[i].lambda) << ',' << (j - i) << ','
           << format_double(train / count) << ','
           << format_double(holdout / count) << ','
           << format_double(gap / count) << '\n';
      out << "ablate gamma=" << format_double(runs[i].gamma)
          << " lambda=" << format_double(runs[i].lambda)
          << " mean_gap=" << format_double(gap / count) << '\n';
      i = j;
    }
    require(file.good(), ErrorCode::io, "write failed: ablate.csv");
  }
  return 0;
}

int run_gradcheck_cmd(const ExperimentConfig& cfg, std::ostream& out) {
  constexpr double kTolerance = 1e-5;
  GradCheckReport report =
      run_gradcheck(cfg.model.seed, cfg.gradcheck_instances);
  {
    std::ofstream file(join_path(cfg.output_dir, "gradcheck.csv"));
    require(file.good(), ErrorCode::io, "cannot write gradcheck.csv");
    file << "instance,description,params,max_rel_err\n";
    for (std::size_t i = 0; i < report.cases.size(); ++i)
      file << i << ',' << report.cases[i].description << ','
           << report.cases[i].params << ','
           << format_double(report.cases[i].max_rel_err) << '\n';
    require(file.good(), ErrorCode::io, "write failed: gradcheck.csv");
  }
  for (const auto& c : report.cases)
    out << "gradcheck " << c.description << ": params=" << c.params
        << " max_rel_err=" << format_double(c.max_rel_err) << '\n';
  out << "gradcheck max relative error: "
      << format_double(report.max_rel_err) << '\n';
  return report.max_rel_err <= kTolerance ? 0 : 1;
}

}  // namespace

int run_experiment(Subcommand cmd, const ExperimentConfig& cfg,
                   std::ostream& out, std::ostream& err) {
  require(cfg.repeat >= 1, ErrorCode::invalid_argument,
          "repeat must be >= 1");
  require(!cfg.output_dir.empty(), ErrorCode::invalid_argument,
          "output_dir must not be empty");
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  require(!ec, ErrorCode::io,
          "cannot create output directory: " + cfg.output_dir);
  write_manifest(cfg.output_dir, cmd, cfg);

  switch (cmd) {
    case Subcommand::complete: return run_complete(cfg, out, err);
    case Subcommand::synth_bench: return run_synth_bench(cfg, out, err);
    case Subcommand::inpaint: return run_inpaint(cfg, out, err);
    case Subcommand::gradcheck: return run_gradcheck_cmd(cfg, out);
    case Subcommand::ablate: return run_ablate(cfg, out, err);
  }
  throw Error(ErrorCode::invalid_argument, "invalid subcommand");
}

}  // namespace dualmc
