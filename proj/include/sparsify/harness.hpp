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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sparsify/errors.hpp"
#include "sparsify/instance.hpp"
#include "sparsify/matching.hpp"
#include "sparsify/nyc.hpp"
#include "sparsify/rng.hpp"
#include "sparsify/strategies.hpp"
#include "sparsify/weights.hpp"

namespace sparsify {

struct MeanCi {
  double mean = 0.0;
  double halfwidth = 0.0;
};

inline double sample_stddev(std::span<const double> samples) {
  if (samples.size() < 2) return 0.0;
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / static_cast<double>(samples.size() - 1));
}

inline double standard_error(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  return sample_stddev(samples) / std::sqrt(static_cast<double>(samples.size()));
}

// Mean and 1.96 s / sqrt(T) with s the sample standard deviation.
inline MeanCi ci95(std::span<const double> samples) {
  if (samples.empty()) throw InvalidInput("ci95 needs at least one sample");
  MeanCi out;
  for (double s : samples) out.mean += s;
  out.mean /= static_cast<double>(samples.size());
  out.halfwidth = 1.96 * standard_error(samples);
  return out;
}

inline std::string strategy_label(const StrategyConfig& s) {
  std::string label(to_string(s.kind));
  if (s.uses_budget()) label += ":" + std::to_string(s.k);
  return label;
}

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// processed exactly once; callers write into per-index slots.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct ExperimentConfig {
  std::vector<StrategyConfig> strategies;
  int trials = 100;
  int mc = kDefaultMonteCarloSimulations;
  std::uint64_t seed = 0;
  int threads = 1;
  WeightSource weights = WeightSource::kMonteCarlo;
  bool spread = false;  // average over interchangeable resources after learning

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (mc < 1) throw ConfigError("Monte Carlo count must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    for (const auto& s : strategies) s.validate();
  }
};

// Fractional solution used by the weighted strategies. Monte Carlo learning
// draws from the experiment seed under the "weights" tag.
inline FractionalSolution learn_weights(const StochasticInstance& instance, WeightSource source,
                                        int mc, std::uint64_t seed, bool spread = false) {
  std::optional<FractionalSolution> x;
  switch (source) {
    case WeightSource::kLp:
      x.emplace(solve_expected_lp(instance));
      break;
    case WeightSource::kMonteCarlo:
      x.emplace(monte_carlo_weights(instance, mc, RngStream(seed, detail::hash_tag("weights"))));
      break;
    case WeightSource::kFile:
      throw ConfigError("file weights must be loaded by the caller");
  }
  if (spread) return spread_equivalence_classes(instance, *x);
  return std::move(*x);
}

struct EfficiencySummary {
  std::string strategy;
  int k = 0;
  double mean = 0.0;  // mean per-trial efficiency
  double ci95 = 0.0;
  int trials = 0;
  double mean_matched = 0.0;
  double stderr_matched = 0.0;

  bool operator==(const EfficiencySummary&) const = default;
};

struct ExperimentResult {
  std::vector<EfficiencySummary> summaries;  // in config order
  int skipped_trials = 0;                    // offline matching of size 0
  double mean_offline = 0.0;
  double stderr_offline = 0.0;
};

// Per trial t: realize with RngStream(seed, t), run offline and every
// strategy on that realization, and record matched / offline. Weights come
// from `weights` when given, otherwise they are learned once up front.
inline ExperimentResult run_experiment(const StochasticInstance& instance, const ExperimentConfig& config,
                                       const FractionalSolution* weights = nullptr) {
  config.validate();
  std::optional<FractionalSolution> learned;
  const bool needs_weights = std::any_of(config.strategies.begin(), config.strategies.end(),
                                         [](const StrategyConfig& s) { return s.uses_weights(); });
  if (needs_weights && weights == nullptr) {
    learned.emplace(learn_weights(instance, config.weights, config.mc, config.seed, config.spread));
    weights = &*learned;
  }

  const auto strategies = config.strategies.size();
  std::vector<int> offline(static_cast<std::size_t>(config.trials), 0);
  std::vector<std::vector<int>> matched(static_cast<std::size_t>(config.trials),
                                        std::vector<int>(strategies, 0));
  parallel_for(config.trials, config.threads, [&](int t) {
    const RngStream trial(config.seed, static_cast<std::uint64_t>(t));
    const RealizedGraph graph = realize(instance, trial.child("realize"));
    offline[t] = max_matching_size(graph);
    for (std::size_t s = 0; s < strategies; ++s) {
      const auto& cfg = config.strategies[s];
      const RngStream rng = trial.child(to_string(cfg.kind), static_cast<std::uint64_t>(cfg.k));
      matched[t][s] = run_strategy(graph, cfg, weights, rng).matched;
    }
  });

  ExperimentResult result;
  std::vector<double> offline_sizes(offline.begin(), offline.end());
  result.mean_offline = ci95(offline_sizes).mean;
  result.stderr_offline = standard_error(offline_sizes);
  result.skipped_trials = static_cast<int>(std::count(offline.begin(), offline.end(), 0));
  for (std::size_t s = 0; s < strategies; ++s) {
    std::vector<double> ratios, sizes;
    for (int t = 0; t < config.trials; ++t) {
      sizes.push_back(matched[t][s]);
      if (offline[t] > 0) ratios.push_back(static_cast<double>(matched[t][s]) / offline[t]);
    }
    EfficiencySummary summary;
    summary.strategy = std::string(to_string(config.strategies[s].kind));
    summary.k = config.strategies[s].uses_budget() ? config.strategies[s].k : 0;
    summary.trials = static_cast<int>(ratios.size());
    if (!ratios.empty()) {
      const MeanCi ci = ci95(ratios);
      summary.mean = ci.mean;
      summary.ci95 = ci.halfwidth;
    }
    summary.mean_matched = ci95(sizes).mean;
    summary.stderr_matched = standard_error(sizes);
    result.summaries.push_back(std::move(summary));
  }
  return result;
}

// Cumulative unmatched riders per strategy, averaged over trials.
struct UnmetDemandSeries {
  std::vector<nyc::Timestamp> timestamps;
  std::vector<std::string> strategies;
  std::vector<std::vector<double>> cumulative;  // [strategy][interval]
  int empty_intervals = 0;

  bool operator==(const UnmetDemandSeries&) const = default;
};

struct NycConfig {
  ExperimentConfig experiment;
  std::optional<nyc::Timestamp> start;  // defaults to the data's first 10-minute boundary
  std::optional<nyc::Timestamp> end;    // exclusive; defaults to the data's last event
};

// Replays the trips in 10-minute intervals. Interval i is centered on
// t_i = start + 5m + 10m * i with supply from [t_i - 5m, t_i) and demand
// from [t_i, t_i + 5m). Each (trial, interval) builds its own instance,
// learns weights and runs every strategy on the same realized riders.
inline UnmetDemandSeries run_nyc_day(const nyc::TripData& data, const NycConfig& config,
                                     std::ostream* log = nullptr) {
  const auto& exp = config.experiment;
  exp.validate();
  if (data.trips.empty() && (!config.start || !config.end)) {
    throw EmptyWindow("no trips to replay");
  }
  nyc::Timestamp first = std::numeric_limits<nyc::Timestamp>::max();
  nyc::Timestamp last = std::numeric_limits<nyc::Timestamp>::min();
  for (const auto& trip : data.trips) {
    first = std::min({first, trip.pickup_time, trip.dropoff_time});
    last = std::max({last, trip.pickup_time, trip.dropoff_time});
  }
  const nyc::Timestamp start =
      config.start.value_or(first - ((first % nyc::kIntervalLength) + nyc::kIntervalLength) % nyc::kIntervalLength);
  const nyc::Timestamp end = config.end.value_or(last + 1);
  const int intervals = static_cast<int>(std::max<nyc::Timestamp>(
      0, (end - start + nyc::kIntervalLength - 1) / nyc::kIntervalLength));

  const auto strategies = exp.strategies.size();
  // unmet[trial][interval][strategy]; -1 marks an empty window
  std::vector<std::vector<std::vector<int>>> unmet(
      static_cast<std::size_t>(exp.trials),
      std::vector<std::vector<int>>(static_cast<std::size_t>(intervals), std::vector<int>(strategies, 0)));
  std::vector<char> empty(static_cast<std::size_t>(intervals), 0);

  parallel_for(exp.trials, exp.threads, [&](int trial) {
    for (int i = 0; i < intervals; ++i) {
      const nyc::Timestamp t = start + nyc::kHalfWindow + nyc::kIntervalLength * i;
      const RngStream rng = RngStream(exp.seed, static_cast<std::uint64_t>(trial)).child("interval", i);
      std::optional<nyc::NycInterval> interval;
      try {
        interval.emplace(nyc::build_nyc_instance(data.trips, data.zones, t, rng.child("build")));
      } catch (const EmptyWindow&) {
        if (trial == 0) empty[i] = 1;
        continue;
      }
      const StochasticInstance& instance = interval->instance;
      const RealizedGraph graph = realize(instance, rng.child("realize"));
      std::optional<FractionalSolution> x;
      for (const auto& cfg : exp.strategies) {
        if (cfg.uses_weights()) {
          x.emplace(monte_carlo_weights(instance, exp.mc, rng.child("weights")));
          break;
        }
      }
      for (std::size_t s = 0; s < strategies; ++s) {
        const auto& cfg = exp.strategies[s];
        const auto out = run_strategy(graph, cfg, x ? &*x : nullptr,
                                      rng.child(to_string(cfg.kind), static_cast<std::uint64_t>(cfg.k)));
        unmet[trial][i][s] = graph.arrival_count() - out.matched;
      }
    }
  });

  UnmetDemandSeries series;
  for (int i = 0; i < intervals; ++i) {
    series.timestamps.push_back(start + nyc::kHalfWindow + nyc::kIntervalLength * i);
    if (empty[i]) {
      ++series.empty_intervals;
      if (log) *log << "empty window at " << nyc::format_timestamp(series.timestamps.back()) << "\n";
    }
  }
  for (std::size_t s = 0; s < strategies; ++s) {
    series.strategies.push_back(strategy_label(exp.strategies[s]));
    std::vector<double> running(static_cast<std::size_t>(intervals), 0.0);
    double acc = 0.0;
    for (int i = 0; i < intervals; ++i) {
      double total = 0.0;
      for (int trial = 0; trial < exp.trials; ++trial) total += unmet[trial][i][s];
      acc += total / exp.trials;
      running[i] = acc;
    }
    series.cumulative.push_back(std::move(running));
  }
  return series;
}

// ---------------------------------------------------------------------------
// Output.

enum class OutputFormat { kCsv, kJson };

inline OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw ConfigError("unknown output format '" + std::string(name) + "'");
}

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace detail

inline std::vector<EfficiencySummary> sorted_summaries(std::vector<EfficiencySummary> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.strategy, a.k) < std::tie(b.strategy, b.k);
  });
  return rows;
}

inline void write_summaries_csv(std::ostream& out, const std::vector<EfficiencySummary>& rows) {
  out << "strategy,k,mean,ci95,trials\n";
  for (const auto& r : sorted_summaries(rows)) {
    out << r.strategy << ',' << r.k << ',' << detail::fixed(r.mean) << ',' << detail::fixed(r.ci95) << ','
        << r.trials << '\n';
  }
}

inline nlohmann::json summaries_to_json(const std::vector<EfficiencySummary>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : sorted_summaries(rows)) {
    out.push_back({{"strategy", r.strategy},
                   {"k", r.k},
                   {"mean", r.mean},
                   {"ci95", r.ci95},
                   {"trials", r.trials},
                   {"mean_matched", r.mean_matched},
                   {"stderr_matched", r.stderr_matched}});
  }
  return out;
}

inline std::vector<EfficiencySummary> summaries_from_json(const nlohmann::json& doc) {
  std::vector<EfficiencySummary> rows;
  try {
    for (const auto& r : doc) {
      rows.push_back({r.at("strategy").get<std::string>(), r.at("k").get<int>(), r.at("mean").get<double>(),
                      r.at("ci95").get<double>(), r.at("trials").get<int>(),
                      r.value("mean_matched", 0.0), r.value("stderr_matched", 0.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed summary document: ") + e.what());
  }
  return rows;
}

// Rows are ordered by strategy label, then time.
inline void write_series_csv(std::ostream& out, const UnmetDemandSeries& series) {
  out << "timestamp,strategy,cumulative_unmet\n";
  std::vector<std::size_t> order(series.strategies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return series.strategies[a] < series.strategies[b]; });
  for (auto s : order) {
    for (std::size_t i = 0; i < series.timestamps.size(); ++i) {
      out << nyc::format_timestamp(series.timestamps[i]) << ',' << series.strategies[s] << ','
          << detail::fixed(series.cumulative[s][i], 4) << '\n';
    }
  }
}

inline nlohmann::json series_to_json(const UnmetDemandSeries& series) {
  nlohmann::json timestamps = nlohmann::json::array();
  for (auto t : series.timestamps) timestamps.push_back(nyc::format_timestamp(t));
  nlohmann::json strategies = nlohmann::json::object();
  for (std::size_t s = 0; s < series.strategies.size(); ++s) {
    strategies[series.strategies[s]] = series.cumulative[s];
  }
  return {{"timestamps", std::move(timestamps)},
          {"cumulative_unmet", std::move(strategies)},
          {"empty_intervals", series.empty_intervals}};
}

inline UnmetDemandSeries series_from_json(const nlohmann::json& doc) {
  UnmetDemandSeries series;
  try {
    for (const auto& t : doc.at("timestamps")) {
      const auto ts = nyc::parse_timestamp(t.get<std::string>());
      if (!ts) throw FormatError("bad timestamp in series document");
      series.timestamps.push_back(*ts);
    }
    // nlohmann objects iterate in key order, matching the CSV ordering.
    for (const auto& [label, values] : doc.at("cumulative_unmet").items()) {
      series.strategies.push_back(label);
      series.cumulative.push_back(values.get<std::vector<double>>());
    }
    series.empty_intervals = doc.value("empty_intervals", 0);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed series document: ") + e.what());
  }
  return series;
}

namespace detail {

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace detail

inline void emit_results(const std::vector<EfficiencySummary>& rows, const std::string& path,
                         OutputFormat format) {
  std::ostringstream out;
  if (format == OutputFormat::kCsv) {
    write_summaries_csv(out, rows);
  } else {
    out << summaries_to_json(rows).dump(2) << '\n';
  }
  detail::write_file(path, out.str());
}

inline void emit_results(const UnmetDemandSeries& series, const std::string& path, OutputFormat format) {
  std::ostringstream out;
  if (format == OutputFormat::kCsv) {
    write_series_csv(out, series);
  } else {
    out << series_to_json(series).dump(2) << '\n';
  }
  detail::write_file(path, out.str());
}

}  // namespace sparsify
