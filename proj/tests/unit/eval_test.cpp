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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "y1jam/eval.hpp"

using namespace y1jam;
namespace fs = std::filesystem;

namespace {

ExperimentConfig part_a(StrategyKind kind) {
  ExperimentConfig cfg;
  cfg.strategy.kind = kind;
  cfg.strategy.rng_seed = cfg.seed;
  return cfg;
}

TickRecord record(std::int64_t offered, double bitrate, double bler = 0, double snr = 0) {
  TickRecord r;
  r.offered_rate_bps = offered;
  r.sample.dl_bitrate_bps = bitrate;
  r.sample.dl_bler_pct = bler;
  r.snr_db = snr;
  return r;
}

void check_cdf(const std::vector<CdfPoint>& cdf) {
  REQUIRE_FALSE(cdf.empty());
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    CHECK(cdf[i].value > cdf[i - 1].value);
    CHECK(cdf[i].fraction >= cdf[i - 1].fraction);
  }
  CHECK(cdf.back().fraction == 1.0);
}

void check_latency_contract(const std::vector<JamDecision>& log) {
  for (const auto& d : log) {
    if (d.tick == 0) {
      CHECK_FALSE(d.snapshot.has_value());
      continue;
    }
    REQUIRE(d.snapshot.has_value());
    CHECK(d.snapshot->tick == d.tick - 1);
  }
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("y1jam_eval_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("bitrate drop arithmetic") {
  CHECK(bitrate_drop(3'949'274.9, 2'154'627.8) == doctest::Approx(45.4).epsilon(0.05 / 45.4));
  CHECK(bitrate_drop(2'386'517, 1'954'988) == doctest::Approx(18.1).epsilon(0.05 / 18.1));
  CHECK(bitrate_drop(1234.5, 1234.5) == 0.0);
  CHECK(bitrate_drop(100, 150) == -50.0);
  CHECK_THROWS_AS(bitrate_drop(0, 1), ZeroBaseline);
}

TEST_CASE("summaries use active ticks only") {
  const std::vector<TickRecord> recs = {record(4'000'000, 2e6, 10, 15), record(0, 0, 0, 3)};
  const auto agg = summarize(recs);
  CHECK(agg.mean_bitrate_bps == 2e6);
  CHECK(agg.mean_bler_pct == 10);
  CHECK(agg.mean_snr_db == 15);
  CHECK(agg.active_traffic_ticks == 1);
  const std::vector<TickRecord> idle = {record(0, 0), record(0, 0)};
  CHECK_THROWS_AS(summarize(idle), NoActiveTraffic);
}

TEST_CASE("empirical CDF") {
  CHECK(empirical_cdf({1, 1, 2}) == std::vector<CdfPoint>{{1, 2.0 / 3.0}, {2, 1.0}});
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<double> v;
    const int n = 1 + static_cast<int>(rng() % 60);
    for (int i = 0; i < n; ++i) v.push_back(static_cast<double>(rng() % 10));
    const auto got = empirical_cdf(v);
    const auto want = oracle::cdf(v);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].value == want[i].first);
      CHECK(got[i].fraction == doctest::Approx(want[i].second));
    }
    check_cdf(got);
  }
}

TEST_CASE("no-jammer run is its own baseline") {
  const auto a = run_experiment(part_a(StrategyKind::None));
  const auto b = run_experiment(part_a(StrategyKind::None));
  CHECK(a.bitrate_drop_pct == 0.0);
  CHECK(a.jam_ticks == 0);
  CHECK(a.summary_json() == b.summary_json());
  CHECK(a.records == b.records);
  CHECK(a.decisions == b.decisions);
}

TEST_CASE("always-on over the on/off scenario") {
  const auto r = run_experiment(part_a(StrategyKind::AlwaysOn));
  CHECK(std::abs(r.bitrate_drop_pct - 45.4) <= 5.0);
  CHECK(r.active_time_pct == 100.0);
  CHECK(r.total_ticks == 270);
  const double recomputed = 100.0 * (r.baseline_bitrate_bps - r.mean_bitrate_bps) / r.baseline_bitrate_bps;
  CHECK(std::abs(recomputed - r.bitrate_drop_pct) <= 1e-9 * std::abs(r.bitrate_drop_pct));
  for (const auto& [name, cdf] : r.cdfs) check_cdf(cdf);
  CHECK(r.cdfs.size() == 3);
}

TEST_CASE("every strategy honors the one-tick feedback latency") {
  for (auto kind : {StrategyKind::None, StrategyKind::AlwaysOn, StrategyKind::Random, StrategyKind::Threshold}) {
    auto cfg = part_a(kind);
    cfg.strategy.duty_p = 0.5;
    cfg.budget = 0.5;
    const auto r = run_experiment(cfg);
    CAPTURE(to_string(kind));
    check_latency_contract(r.decisions);
    CHECK(r.jam_ticks <= oracle::budget_cap(50, 270));
  }
}

TEST_CASE("clustering needs a model") {
  auto cfg = part_a(StrategyKind::Clustering);
  CHECK_THROWS_AS(run_experiment(cfg), ModelMissing);
  cfg.model_path = "/nonexistent/model.json";
  CHECK_THROWS(run_experiment(cfg));
}

TEST_CASE("profiling the multi-rate scenario") {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::PartB;
  cfg.seed = kPartBDefaultSeed;
  const auto rows = collect_training_set(cfg);
  CHECK(rows.size() == 220);
  const auto m = profile_phase(cfg);
  CHECK(m.centroids.size() == 4);
  const std::vector<double> eps = {0.2, 0.3, 0.5};
  const auto sweep = eps_sweep(rows, eps, 10);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[1].clusters == 4);
  CHECK(sweep[1].noise > 0);

  cfg.min_pts = 500;
  CHECK_THROWS_WITH_AS(profile_phase(cfg), doctest::Contains("--sweep"), NoValidClusters);
}

TEST_CASE("an all-idle trace profiles to a single idle cluster") {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::Custom;
  cfg.custom = TrafficScenario{{{230, 0}}, 1, 230};
  const auto m = profile_phase(cfg);
  REQUIRE(m.centroids.size() == 1);
  CHECK(m.labels_semantic.at(0) == TrafficClass::Idle);
}

TEST_CASE("targeting HIGH beats matched random jamming at 25%") {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::PartB;
  cfg.seed = kPartBDefaultSeed;
  cfg.profile_first = true;
  cfg.budget = 0.25;
  cfg.strategy.kind = StrategyKind::Clustering;
  cfg.targets = std::vector<TrafficClass>{TrafficClass::High};
  const auto high = run_experiment(cfg);
  CHECK(high.strategy == "clustering[HIGH]");

  auto rnd = cfg;
  rnd.targets.reset();
  rnd.strategy.kind = StrategyKind::Random;
  rnd.strategy.duty_p = 0.25;
  rnd.strategy.rng_seed = cfg.seed;
  const auto random = run_experiment(rnd);
  CHECK(high.bitrate_drop_pct > random.bitrate_drop_pct);
  CHECK(high.jam_ticks <= 55);
}

TEST_CASE("budget sweep shapes") {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::PartB;
  cfg.seed = kPartBDefaultSeed;
  cfg.profile_first = true;
  const std::vector<std::string> strategies = {"random", "low", "medium", "high"};
  const auto empty = budget_sweep(cfg, std::vector<double>{}, strategies);
  CHECK(empty.rows.empty());
  CHECK(empty.baseline_bitrate_bps > 0);

  const std::vector<double> budgets = {0.10, 0.25};
  const auto t = budget_sweep(cfg, budgets, strategies);
  CHECK(t.rows.size() == 8);
  CHECK(t.decisions.size() == 8);
  const auto md = sweep_table_markdown(t);
  CHECK(md.find("| No Jammer") != std::string::npos);
  CHECK(md.find("high") != std::string::npos);
  CHECK(sweep_table_json(t).at("rows").size() == 8);
  const auto csv = sweep_table_csv(t);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  const std::vector<std::string> idle = {"idle"};
  CHECK_THROWS_AS(budget_sweep(cfg, budgets, idle), ConfigError);
}

TEST_CASE("report files") {
  auto cfg = part_a(StrategyKind::Threshold);
  cfg.output_dir = scratch("report");
  const auto r = run_experiment(cfg);
  for (auto name : {"report.json", "perticks.csv", "cdf_bler.csv", "cdf_snr.csv", "cdf_bitrate.csv", "decisions.csv"})
    CHECK(fs::exists(cfg.output_dir / name));
  std::ifstream decisions(cfg.output_dir / "decisions.csv");
  std::string line;
  int rows = -1;
  while (std::getline(decisions, line)) ++rows;
  CHECK(rows == 270);
  std::ifstream report(cfg.output_dir / "report.json");
  const auto j = nlohmann::json::parse(report);
  CHECK(j.at("bitrate_drop_pct").get<double>() == doctest::Approx(r.bitrate_drop_pct));
  fs::remove_all(cfg.output_dir);

  std::ostringstream cdf;
  write_cdf_csv(cdf, empirical_cdf({1, 1, 2}));
  CHECK(cdf.str().rfind("value,cumulative_fraction\n", 0) == 0);

  const std::vector<nlohmann::json> summaries = {r.summary_json()};
  const auto md = session_table_markdown(summaries);
  CHECK(md.find("| Strategy") == 0);
  CHECK(md.find("threshold") != std::string::npos);
}

TEST_CASE("baseline cache keys on content") {
  BaselineCache cache;
  const auto a = scenario_part_a(1), b = scenario_part_a(2);
  LinkModelParams link;
  CHECK(BaselineCache::key(a, link) == BaselineCache::key(scenario_part_a(1), link));
  CHECK(BaselineCache::key(a, link) != BaselineCache::key(b, link));
  link.snr_clear_db += 1;
  CHECK(BaselineCache::key(a, link) != BaselineCache::key(a, LinkModelParams{}));
  const double first = baseline_bitrate(a, link, cache);
  CHECK(cache.size() == 1);
  CHECK(baseline_bitrate(a, link, cache) == first);
  CHECK(cache.size() == 1);
  cache.clear();
  CHECK(cache.size() == 0);
}

TEST_CASE("experiment config from key-value text") {
  auto cfg = ExperimentConfig::from_config(KeyValueConfig::parse(
      "scenario = part_b\nstrategy = clustering\ntarget = HIGH\nbudget = 25%\nprofile = 1\n"
      "mode = live\ntick_ms = 20\nmetrics_filter = dl_cqi,dl_mcs,dl_bitrate,dl_bler\n"));
  CHECK(cfg.scenario == ScenarioKind::PartB);
  CHECK(cfg.seed == kPartBDefaultSeed);
  CHECK(cfg.strategy.kind == StrategyKind::Clustering);
  REQUIRE(cfg.targets.has_value());
  CHECK(cfg.targets->front() == TrafficClass::High);
  CHECK(cfg.budget == doctest::Approx(0.25));
  CHECK(cfg.profile_first);
  CHECK(cfg.mode == RunMode::Live);
  CHECK(cfg.tick_duration.count() == 20);
  CHECK(cfg.metrics_filter.size() == 4);

  CHECK(ExperimentConfig::from_config(KeyValueConfig::parse("budget = 0.1")).budget == doctest::Approx(0.1));
  CHECK(ExperimentConfig::from_config(KeyValueConfig::parse("budget = 15")).budget == doctest::Approx(0.15));
  CHECK_FALSE(ExperimentConfig::from_config(KeyValueConfig::parse("budget = none")).budget.has_value());
  CHECK_THROWS_AS(ExperimentConfig::from_config(KeyValueConfig::parse("scenario = part_c")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_config(KeyValueConfig::parse("budget = lots")), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_config(KeyValueConfig::parse("mode = turbo")), ConfigError);

  ExperimentConfig bad;
  bad.metrics_filter = {"nope"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  ExperimentConfig zero;
  zero.period_s = 0;
  CHECK_THROWS_AS(zero.validate(), ConfigError);

  auto custom = ExperimentConfig::from_config(
      KeyValueConfig::parse("scenario = custom\nsegment = 10 4000000\nsegment = 10 0\n"));
  CHECK(custom.build_scenario().total_s == 20);
}
