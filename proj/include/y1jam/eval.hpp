/*
 * Copyright (c) 2026 The y1jamlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "y1jam/config.hpp"
#include "y1jam/http.hpp"
#include "y1jam/jammer.hpp"
#include "y1jam/profiler.hpp"
#include "y1jam/ran_sim.hpp"

namespace y1jam {

class ModelMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroBaseline : public std::invalid_argument {
 public:
  ZeroBaseline() : std::invalid_argument("baseline bitrate must be positive") {}
};

class NoActiveTraffic : public std::runtime_error {
 public:
  NoActiveTraffic() : std::runtime_error("session has no tick with offered traffic") {}
};

enum class ScenarioKind { PartA, PartB, Custom };
enum class RunMode { Virtual, Live };

std::string_view to_string(ScenarioKind k);
std::string_view to_string(RunMode m);

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::PartA;
  /// Part A: layout and jitter. Part B: jitter only.
  std::uint64_t seed = 42;
  OnOffOptions part_a;
  /// Used when scenario is Custom.
  TrafficScenario custom;
  StrategyConfig strategy;
  /// Semantic targets resolved against the model once it is known; when
  /// unset, strategy.allow_set is used as given.
  std::optional<std::vector<TrafficClass>> targets;
  std::optional<double> budget;  // nullopt = unlimited
  LinkModelParams link;
  RunMode mode = RunMode::Virtual;
  std::filesystem::path output_dir;  // empty: nothing written
  std::optional<std::filesystem::path> model_path;
  bool profile_first = false;
  double eps = 0.30;
  std::size_t min_pts = 10;
  double period_s = 1.0;
  std::vector<std::string> metrics_filter;
  // LIVE mode only.
  std::chrono::milliseconds tick_duration{100};
  TlsConfig tls;
  std::string host = "127.0.0.1";

  TrafficScenario build_scenario() const;
  /// Throws ConfigError.
  void validate() const;

  /// Keys: scenario (part_a | part_b | custom with `segment` lines), seed,
  /// strategy parameters (see StrategyConfig), budget (fraction or percent),
  /// mode, out, model, profile, eps, min_pts, period, metrics_filter,
  /// tick_ms, tls_*; link parameters and Part A generator options share the
  /// same file.
  static ExperimentConfig from_config(const KeyValueConfig& cfg);
};

/// 100 × (baseline − observed) / baseline; negative values are kept.
double bitrate_drop(double baseline_bps, double observed_bps);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;
  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Sorted distinct values with the fraction of samples at or below each.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

struct SessionAggregates {
  double mean_bler_pct = 0.0;
  double mean_snr_db = 0.0;
  double mean_bitrate_bps = 0.0;
  std::int64_t active_traffic_ticks = 0;
  std::map<std::string, std::vector<CdfPoint>> cdfs;  // bler, snr, bitrate
};

/// Means and CDFs over ticks with offered traffic. Throws NoActiveTraffic.
SessionAggregates summarize(std::span<const TickRecord> records);

struct MetricsReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string strategy;
  std::optional<double> budget;
  std::string mode;
  double mean_bler_pct = 0.0;
  double mean_snr_db = 0.0;
  double mean_bitrate_bps = 0.0;
  double baseline_bitrate_bps = 0.0;
  double bitrate_drop_pct = 0.0;
  std::int64_t jam_ticks = 0;
  std::int64_t total_ticks = 0;
  std::optional<std::int64_t> budget_limit;
  double active_time_pct = 0.0;
  std::vector<TickRecord> records;
  std::vector<JamDecision> decisions;
  std::map<std::string, std::vector<CdfPoint>> cdfs;

  /// Summary fields only (no per-tick data).
  nlohmann::json summary_json() const;
};

/// Remembers no-jammer mean bitrates keyed by a SHA-256 of the scenario,
/// seed and link parameters.
class BaselineCache {
 public:
  static BaselineCache& global();
  static std::string key(const TrafficScenario& scenario, const LinkModelParams& link);

  std::optional<double> get(const std::string& key) const;
  void put(const std::string& key, double mean_bitrate_bps);
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::map<std::string, double> entries_;
};

/// Mean active bitrate of the jam-free run, from the cache when possible.
double baseline_bitrate(const TrafficScenario& scenario, const LinkModelParams& link,
                        BaselineCache& cache = BaselineCache::global());

struct LoopResult {
  std::vector<TickRecord> records;
  std::vector<JamDecision> decisions;
};

/// In-process closed loop on a shared logical clock: simulator, SDL store,
/// producer, consumer, relay and jammer.
LoopResult run_virtual_loop(const TrafficScenario& scenario, const ExperimentConfig& cfg,
                            const StrategyConfig& strategy);
/// The same loop over localhost HTTP(S) and TCP sockets.
LoopResult run_live_loop(const TrafficScenario& scenario, const ExperimentConfig& cfg,
                         const StrategyConfig& strategy);

/// Runs one session and writes the report when cfg.output_dir is set.
/// Throws ConfigError, ModelMissing or PortBindError.
MetricsReport run_experiment(const ExperimentConfig& cfg);

/// Jam-free feature vectors of the configured scenario, one per tick.
std::vector<Vec4> collect_training_set(const ExperimentConfig& cfg);
/// Trains a cluster model on the jam-free trace of the configured scenario.
/// Throws NoValidClusters with a hint to sweep eps.
ClusterModel profile_phase(const ExperimentConfig& cfg);

struct SweepRow {
  double budget = 0.0;
  std::string strategy;  // random, low, medium, high
  double mean_bitrate_bps = 0.0;
  double bitrate_drop_pct = 0.0;
  double mean_bler_pct = 0.0;
  std::int64_t jam_ticks = 0;
  std::int64_t budget_limit = 0;
};

struct SweepTable {
  double baseline_bitrate_bps = 0.0;
  double baseline_bler_pct = 0.0;
  std::vector<SweepRow> rows;
  /// Decision logs in row order.
  std::vector<std::vector<JamDecision>> decisions;
};

/// One run per (budget, strategy). "random" jams with duty_p equal to the
/// budget; "high", "medium" and "low" target that cluster. The model comes
/// from cfg (path or profiling) as in run_experiment.
SweepTable budget_sweep(const ExperimentConfig& cfg, std::span<const double> budgets,
                        std::span<const std::string> strategies);

/// report.json, perticks.csv, cdf_{bler,snr,bitrate}.csv, decisions.csv.
void write_report(const MetricsReport& report, const std::filesystem::path& dir);
void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf);

/// Markdown table in the layout of the always-on / threshold / random
/// comparison: Strategy | BLER (%) | SNR (dB) | Bitrate (bps) | Drop (%) | Active (%).
std::string session_table_markdown(std::span<const nlohmann::json> summaries);
/// Markdown table of a budget sweep: one row per strategy, per-budget
/// Bitrate / Drop / BLER columns, plus a baseline row.
std::string sweep_table_markdown(const SweepTable& table);
std::string sweep_table_csv(const SweepTable& table);
nlohmann::json sweep_table_json(const SweepTable& table);

}  // namespace y1jam
