// Copyright 2026 The sparsify Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line experiment runner.
//
//   sparsify synth   --family bahmani --n 100 --trials 100 --mc 100 --seed 7
//   sparsify nyc     --trips trips.csv --zones zones.csv
//   sparsify bounds  --n 100 --k 3,5,10
//   sparsify weights --family block --n 100 --weights-out w.json
//
// Flags may also come from a flat `key = value` file given with --config;
// command-line flags win. Exit codes: 0 ok, 2 configuration error, 3 I/O or
// data error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsify/sparsify.hpp"

namespace {

using namespace sparsify;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonFlags {
  std::uint64_t seed = 1;
  int trials = 100;
  int mc = kDefaultMonteCarloSimulations;
  int threads = 1;
  std::string out;
  std::string format = "csv";
};

struct InstanceFlags {
  std::string family;
  std::string instance_path;
  int n = 100;
  bool per_side = false;
};

struct StrategyFlags {
  std::string strategies;
  std::string ks = "3,5,10";
  std::string weights = "montecarlo";
  std::string weights_in;
  bool spread = false;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) parts.push_back(item.substr(b, e - b + 1));
  }
  return parts;
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad ") + what + " '" + s + "'");
  }
}

std::vector<int> parse_ks(const std::string& text) {
  std::vector<int> ks;
  for (const auto& part : split(text, ',')) ks.push_back(parse_int(part, "k"));
  if (ks.empty()) throw ConfigError("empty k list");
  return ks;
}

// "kvv,mgs,random:3,varopt" -- bare random/varopt expand over `ks`.
std::vector<StrategyConfig> parse_strategies(const std::string& text, const std::vector<int>& ks,
                                             WeightSource weights) {
  std::vector<StrategyConfig> out;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    StrategyConfig cfg;
    cfg.kind = parse_strategy_kind(item.substr(0, colon));
    cfg.weights = weights;
    if (colon != std::string::npos) {
      if (!cfg.uses_budget()) throw ConfigError("strategy " + item + " takes no k");
      cfg.k = parse_int(item.substr(colon + 1), "k");
      out.push_back(cfg);
    } else if (cfg.uses_budget()) {
      for (int k : ks) {
        cfg.k = k;
        out.push_back(cfg);
      }
    } else {
      out.push_back(cfg);
    }
  }
  if (out.empty()) throw ConfigError("no strategies selected");
  return out;
}

generators::Sizing sizing(const InstanceFlags& flags) {
  return flags.per_side ? generators::Sizing::kPerSide : generators::Sizing::kParameter;
}

StochasticInstance load_instance(const InstanceFlags& flags) {
  if (!flags.instance_path.empty()) {
    std::ifstream in(flags.instance_path);
    if (!in) throw IoError("cannot open instance file " + flags.instance_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("instance file is not JSON: ") + e.what());
    }
    return instance_from_json(doc);
  }
  if (flags.family.empty()) throw ConfigError("give --family or --instance");
  return generators::make(generators::parse_family(flags.family), flags.n, sizing(flags));
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + " is not JSON: " + e.what());
  }
}

void write_output(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::cout << contents;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << contents;
}

ExperimentConfig experiment_config(const CommonFlags& common, const StrategyFlags& sflags,
                                   const std::string& default_strategies) {
  ExperimentConfig config;
  config.seed = common.seed;
  config.trials = common.trials;
  config.mc = common.mc;
  config.threads = common.threads;
  config.weights = parse_weight_source(sflags.weights);
  config.spread = sflags.spread;
  config.strategies = parse_strategies(sflags.strategies.empty() ? default_strategies : sflags.strategies,
                                       parse_ks(sflags.ks), config.weights);
  return config;
}

int run_synth(const CommonFlags& common, const InstanceFlags& iflags, const StrategyFlags& sflags) {
  const StochasticInstance instance = load_instance(iflags);
  ExperimentConfig config =
      experiment_config(common, sflags, "kvv,mgs,random:3,random:5,random:10,varopt:3,varopt:5,varopt:10");
  std::optional<FractionalSolution> preset;
  if (config.weights == WeightSource::kFile) {
    if (sflags.weights_in.empty()) throw ConfigError("--weights file needs --weights-in");
    preset.emplace(solution_from_json(instance, read_json(sflags.weights_in)));
  } else if (!sflags.weights_in.empty()) {
    preset.emplace(solution_from_json(instance, read_json(sflags.weights_in)));
  }
  const ExperimentResult result = run_experiment(instance, config, preset ? &*preset : nullptr);
  if (result.skipped_trials > 0) {
    std::cerr << result.skipped_trials << " trial(s) with an empty offline matching were skipped\n";
  }
  const OutputFormat format = parse_format(common.format);
  std::ostringstream out;
  if (format == OutputFormat::kCsv) {
    write_summaries_csv(out, result.summaries);
  } else {
    out << summaries_to_json(result.summaries).dump(2) << '\n';
  }
  write_output(common.out, out.str());
  return 0;
}

int run_nyc(const CommonFlags& common, const StrategyFlags& sflags, const std::string& trips,
            const std::string& zones, const std::string& interval) {
  if (trips.empty() || zones.empty()) throw ConfigError("nyc needs --trips and --zones");
  const nyc::TripData data = nyc::ingest_trips(trips, zones);
  if (data.dropped_rows > 0) std::cerr << "dropped " << data.dropped_rows << " malformed trip row(s)\n";
  NycConfig config;
  config.experiment = experiment_config(common, sflags, "offline,kvv,mgs,random:5,varopt:3,varopt:5,varopt:10");
  if (!interval.empty()) {
    const auto t = nyc::parse_timestamp(interval);
    if (!t) throw ConfigError("bad --interval timestamp '" + interval + "'");
    config.start = *t - nyc::kHalfWindow;
    config.end = config.start.value() + nyc::kIntervalLength;
  }
  const UnmetDemandSeries series = run_nyc_day(data, config, &std::cerr);
  const OutputFormat format = parse_format(common.format);
  std::ostringstream out;
  if (format == OutputFormat::kCsv) {
    write_series_csv(out, series);
  } else {
    out << series_to_json(series).dump(2) << '\n';
  }
  write_output(common.out, out.str());
  return 0;
}

int run_bounds(const CommonFlags& common, const InstanceFlags& iflags, const StrategyFlags& sflags) {
  std::vector<std::pair<std::string, StochasticInstance>> instances;
  if (iflags.family.empty() && iflags.instance_path.empty()) {
    for (auto f : generators::kAllFamilies) {
      instances.emplace_back(std::string(generators::to_string(f)), generators::make(f, iflags.n, sizing(iflags)));
    }
  } else {
    instances.emplace_back(iflags.family.empty() ? iflags.instance_path : iflags.family, load_instance(iflags));
  }
  const std::vector<int> ks = parse_ks(sflags.ks);
  const WeightSource source = parse_weight_source(sflags.weights);
  if (source == WeightSource::kFile) throw ConfigError("bounds learns its own weights (lp or montecarlo)");

  std::ostringstream table;
  table << "instance,k,Z,ZH_over_Z,theorem_bound,empirical_mean,stderr,verdict\n";
  std::ostringstream sandwich;
  sandwich << "instance,opt_lp,offline_mean,stderr,lower,upper,verdict\n";
  for (const auto& [name, instance] : instances) {
    const FractionalSolution x = learn_weights(instance, source, common.mc, common.seed, sflags.spread);
    ExperimentConfig config;
    config.seed = common.seed;
    config.trials = common.trials;
    config.mc = common.mc;
    config.threads = common.threads;
    for (int k : ks) config.strategies.push_back({StrategyKind::kVarOpt, k, source});
    const ExperimentResult result = run_experiment(instance, config, &x);
    for (std::size_t a = 0; a < ks.size(); ++a) {
      const HeavyLightSplit split = heavy_light(x, ks[a]);
      const bounds::BoundInputs in{split.heavy_mass + split.light_mass, split.heavy_mass, split.light_mass, ks[a]};
      const double bound = bounds::theorem_bound(in);
      const auto& s = result.summaries[a];
      const bool holds = bound <= s.mean_matched + 4.0 * s.stderr_matched;
      char line[256];
      std::snprintf(line, sizeof line, "%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", name.c_str(), ks[a], in.z,
                    in.z_heavy / in.z, bound, s.mean_matched, s.stderr_matched,
                    bounds::is_vacuous(bound) ? "vacuous" : (holds ? "holds" : "VIOLATED"));
      table << line;
    }
    const double opt_lp = solve_expected_lp(instance).objective();
    const auto verdict = bounds::sandwich_check(opt_lp, result.mean_offline, result.stderr_offline);
    char line[256];
    std::snprintf(line, sizeof line, "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", name.c_str(), opt_lp, result.mean_offline,
                  result.stderr_offline, verdict.lower, verdict.upper, verdict.pass ? "pass" : "FAIL");
    sandwich << line;
  }
  write_output(common.out, table.str());
  std::cout << (common.out.empty() ? "\n" : "") << sandwich.str();
  return 0;
}

int run_weights(const CommonFlags& common, const InstanceFlags& iflags, const StrategyFlags& sflags,
                const std::string& weights_out) {
  if (weights_out.empty()) throw ConfigError("weights needs --weights-out");
  const StochasticInstance instance = load_instance(iflags);
  const WeightSource source = parse_weight_source(sflags.weights);
  if (source == WeightSource::kFile) throw ConfigError("weights learns lp or montecarlo solutions");
  const FractionalSolution x = learn_weights(instance, source, common.mc, common.seed, sflags.spread);
  write_output(weights_out, solution_to_json(x).dump(2) + "\n");
  std::cerr << "Z = " << x.objective() << (x.feasible() ? " (feasible)" : " (INFEASIBLE)") << "\n";
  return 0;
}

// Turns `key = value` lines into `--key value` arguments.
std::vector<std::string> config_arguments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
    auto key = split(line.substr(0, eq), '\n');
    auto value = split(line.substr(eq + 1), '\n');
    if (key.empty()) throw ConfigError("config line without key: " + line);
    std::string name = key.front();
    for (auto& c : name) c = c == '_' ? '-' : c;
    std::string v = value.empty() ? "" : value.front();
    if (!v.empty() && v.back() == '\r') v.pop_back();
    if (name == "strategy") name = "strategies";
    if (v == "true" || v == "false") {
      if (v == "true") args.push_back("--" + name);
      continue;
    }
    args.push_back("--" + name);
    args.push_back(v);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local sparsification for stochastic bipartite matching"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonFlags common;
  InstanceFlags iflags;
  StrategyFlags sflags;
  std::string config_path, trips, zones, interval, weights_out;

  auto add_common = [&](CLI::App* sub) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--seed", common.seed, "Experiment seed");
    sub->add_option("--trials", common.trials, "Independent trials");
    sub->add_option("--mc", common.mc, "Monte Carlo simulations for weight learning");
    sub->add_option("--threads", common.threads, "Worker threads");
    sub->add_option("--out", common.out, "Output path (stdout when omitted)");
    sub->add_option("--format", common.format, "csv or json");
    sub->add_option("--config", config_path, "Flat key = value config file");
  };
  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("--family", iflags.family, "block, triangular, bahmani or tsm");
    sub->add_option("--instance", iflags.instance_path, "Instance JSON file");
    sub->add_option("--n", iflags.n, "Family size parameter");
    sub->add_flag("--per-side", iflags.per_side, "Read --n as vertices per side (changes bahmani only)");
  };
  auto add_strategy = [&](CLI::App* sub) {
    sub->add_option("--strategies", sflags.strategies, "Comma list, e.g. kvv,mgs,random:3,varopt:5");
    sub->add_option("--k", sflags.ks, "Budgets for bare random/varopt entries");
    sub->add_option("--weights", sflags.weights, "lp, montecarlo or file");
    sub->add_option("--weights-in", sflags.weights_in, "Cached fractional solution JSON");
    sub->add_flag("--spread", sflags.spread, "Average weights over interchangeable resources");
  };

  auto* synth = app.add_subcommand("synth", "Efficiency table on a synthetic family");
  add_common(synth);
  add_instance(synth);
  add_strategy(synth);

  auto* nyc_cmd = app.add_subcommand("nyc", "Cumulative unmet demand over a trip replay");
  add_common(nyc_cmd);
  add_strategy(nyc_cmd);
  nyc_cmd->add_option("--trips", trips, "Trip CSV (TLC schema)");
  nyc_cmd->add_option("--zones", zones, "Zone adjacency CSV");
  nyc_cmd->add_option("--interval", interval, "Run a single interval centered at this RFC 3339 time");

  auto* bounds_cmd = app.add_subcommand("bounds", "Guarantee vs. empirical sparsifier matching size");
  add_common(bounds_cmd);
  add_instance(bounds_cmd);
  add_strategy(bounds_cmd);

  auto* weights_cmd = app.add_subcommand("weights", "Learn and cache a fractional solution");
  add_common(weights_cmd);
  add_instance(weights_cmd);
  add_strategy(weights_cmd);
  weights_cmd->add_option("--weights-out", weights_out, "Destination JSON");

  try {
    // Splice config-file flags in right after the subcommand so that
    // explicit flags, which come later, take precedence.
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t a = 0; a + 1 < args.size(); ++a) {
      if (args[a] == "--config") {
        const auto extra = config_arguments(args[a + 1]);
        if (!args.empty()) args.insert(args.begin() + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*synth) return run_synth(common, iflags, sflags);
    if (*nyc_cmd) return run_nyc(common, sflags, trips, zones, interval);
    if (*bounds_cmd) return run_bounds(common, iflags, sflags);
    if (*weights_cmd) return run_weights(common, iflags, sflags, weights_out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const EmptyWindow& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
