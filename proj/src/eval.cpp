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

#include "y1jam/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "y1jam/live.hpp"
#include "y1jam/sdl_store.hpp"
#include "y1jam/y1_consumer.hpp"
#include "y1jam/y1_producer.hpp"

namespace y1jam {

using nlohmann::json;

namespace {

std::optional<double> parse_budget(const std::string& text) {
  if (text == "none" || text == "unlimited" || text.empty()) return std::nullopt;
  std::string digits = text;
  const bool percent = !digits.empty() && digits.back() == '%';
  if (percent) digits.pop_back();
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(digits, &used);
    if (used != digits.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("budget '" + text + "' is not a number");
  }
  if (percent || v > 1.0) v /= 100.0;
  return v;
}

SubscriptionRequest subscription_for(const ExperimentConfig& cfg, std::string target) {
  SubscriptionRequest req;
  req.rai_type = kRaiTypePerformance;
  req.rai_type_version = "1.0";
  req.criteria.trigger = Trigger::Periodic;
  req.criteria.period_s = cfg.period_s;
  req.notification_target_address = std::move(target);
  req.metrics_filter = cfg.metrics_filter;
  return req;
}

std::vector<TickRecord> jam_free_records(const TrafficScenario& scenario, const LinkModelParams& link) {
  Simulator sim(scenario, link);
  std::vector<TickRecord> out;
  out.reserve(static_cast<std::size_t>(sim.total_ticks()));
  while (!sim.done()) out.push_back(sim.advance(false));
  return out;
}

StrategyConfig resolve_strategy(const ExperimentConfig& cfg) {
  StrategyConfig s = cfg.strategy;
  if (s.kind != StrategyKind::Clustering) return s;
  if (!s.model) {
    if (cfg.model_path) {
      s.model = std::make_shared<const ClusterModel>(ClusterModel::load(*cfg.model_path));
    } else if (cfg.profile_first) {
      s.model = std::make_shared<const ClusterModel>(profile_phase(cfg));
    } else {
      throw ModelMissing("clustering strategy needs a model file or a profiling phase");
    }
  }
  if (cfg.targets) s.allow_set = target_to_allow(*s.model, *cfg.targets);
  s.validate();
  return s;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

}  // namespace

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::PartA: return "part_a";
    case ScenarioKind::PartB: return "part_b";
    case ScenarioKind::Custom: return "custom";
  }
  return "?";
}
std::string_view to_string(RunMode m) { return m == RunMode::Virtual ? "virtual" : "live"; }

TrafficScenario ExperimentConfig::build_scenario() const {
  switch (scenario) {
    case ScenarioKind::PartA: return scenario_part_a(seed, part_a);
    case ScenarioKind::PartB: return scenario_part_b(seed);
    case ScenarioKind::Custom: break;
  }
  return custom;
}

void ExperimentConfig::validate() const {
  link.validate();
  if (scenario == ScenarioKind::Custom) custom.validate();
  if (budget && !(*budget > 0.0 && *budget <= 1.0)) {
    throw ConfigError(fmt::format("budget must be in (0,1], got {}", *budget));
  }
  if (!(period_s > 0.0)) throw ConfigError("notification period must be positive");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (min_pts < 1) throw ConfigError("min_pts must be at least 1");
  for (const auto& m : metrics_filter) {
    if (!canonical_metric_name(m)) throw ConfigError("unknown metric '" + m + "' in metrics filter");
  }
  if (strategy.kind != StrategyKind::Clustering || strategy.model) strategy.validate();
  if (mode == RunMode::Live && tick_duration.count() < 0) throw ConfigError("tick duration must be >= 0");
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& cfg) {
  ExperimentConfig e;
  const auto scenario = cfg.get_string("scenario", "part_a");
  if (scenario == "part_a") {
    e.scenario = ScenarioKind::PartA;
  } else if (scenario == "part_b") {
    e.scenario = ScenarioKind::PartB;
    e.seed = kPartBDefaultSeed;
  } else if (scenario == "custom") {
    e.scenario = ScenarioKind::Custom;
    e.custom = TrafficScenario::from_config(cfg);
    e.seed = e.custom.seed;
  } else {
    throw ConfigError("unknown scenario '" + scenario + "'");
  }
  e.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(e.seed)));
  e.custom.seed = e.seed;
  e.part_a = OnOffOptions::from_config(cfg);
  e.link = LinkModelParams::from_config(cfg);

  const auto kind_text = cfg.get_string("strategy", "none");
  auto kind = parse_strategy_kind(kind_text);
  if (!kind) throw ConfigError("unknown strategy '" + kind_text + "'");
  e.strategy.kind = *kind;
  e.strategy.theta_bps = cfg.get_double("theta", e.strategy.theta_bps);
  e.strategy.duty_p = cfg.get_double("duty_p", e.strategy.duty_p);
  e.strategy.burst_len = cfg.get_int("burst_len", e.strategy.burst_len);
  e.strategy.rng_seed = e.seed;
  if (*kind == StrategyKind::Clustering) {
    if (cfg.contains("allow")) {
      for (double v : cfg.get_double_list("allow")) e.strategy.allow_set.insert(static_cast<int>(v));
    } else {
      std::vector<TrafficClass> targets;
      for (const auto& t : split(cfg.get_string("target", "HIGH"), ',')) {
        auto cls = parse_traffic_class(t);
        if (!cls) throw ConfigError("unknown target class '" + t + "'");
        targets.push_back(*cls);
      }
      e.targets = targets;
    }
  }

  e.budget = parse_budget(cfg.get_string("budget", "none"));
  const auto mode = cfg.get_string("mode", "virtual");
  if (mode == "virtual") {
    e.mode = RunMode::Virtual;
  } else if (mode == "live") {
    e.mode = RunMode::Live;
  } else {
    throw ConfigError("unknown mode '" + mode + "'");
  }
  e.output_dir = cfg.get_string("out", "");
  if (cfg.contains("model")) e.model_path = cfg.get_string("model", "");
  e.profile_first = cfg.get_int("profile", 0) != 0;
  e.eps = cfg.get_double("eps", e.eps);
  e.min_pts = static_cast<std::size_t>(cfg.get_int("min_pts", static_cast<std::int64_t>(e.min_pts)));
  e.period_s = cfg.get_double("period", e.period_s);
  if (cfg.contains("metrics_filter")) e.metrics_filter = split(cfg.get_string("metrics_filter", ""), ',');
  e.tick_duration = std::chrono::milliseconds(cfg.get_int("tick_ms", e.tick_duration.count()));
  e.tls = TlsConfig::from_config(cfg);
  e.host = cfg.get_string("host", e.host);
  e.validate();
  return e;
}

double bitrate_drop(double baseline_bps, double observed_bps) {
  if (!(baseline_bps > 0.0)) throw ZeroBaseline();
  return 100.0 * (baseline_bps - observed_bps) / baseline_bps;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

SessionAggregates summarize(std::span<const TickRecord> records) {
  SessionAggregates agg;
  std::vector<double> bler, snr, bitrate;
  for (const auto& r : records) {
    if (r.offered_rate_bps <= 0) continue;
    bler.push_back(r.sample.dl_bler_pct);
    snr.push_back(r.snr_db);
    bitrate.push_back(r.sample.dl_bitrate_bps);
  }
  if (bitrate.empty()) throw NoActiveTraffic();
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  agg.mean_bler_pct = mean(bler);
  agg.mean_snr_db = mean(snr);
  agg.mean_bitrate_bps = mean(bitrate);
  agg.active_traffic_ticks = static_cast<std::int64_t>(bitrate.size());
  agg.cdfs["bler"] = empirical_cdf(std::move(bler));
  agg.cdfs["snr"] = empirical_cdf(std::move(snr));
  agg.cdfs["bitrate"] = empirical_cdf(std::move(bitrate));
  return agg;
}

json MetricsReport::summary_json() const {
  return json{{"scenario", scenario},
              {"seed", seed},
              {"strategy", strategy},
              {"budget", budget ? json(*budget) : json(nullptr)},
              {"budget_limit", budget_limit ? json(*budget_limit) : json(nullptr)},
              {"mode", mode},
              {"mean_bler_pct", mean_bler_pct},
              {"mean_snr_db", mean_snr_db},
              {"mean_bitrate_bps", mean_bitrate_bps},
              {"baseline_bitrate_bps", baseline_bitrate_bps},
              {"bitrate_drop_pct", bitrate_drop_pct},
              {"jam_ticks", jam_ticks},
              {"total_ticks", total_ticks},
              {"active_time_pct", active_time_pct}};
}

BaselineCache& BaselineCache::global() {
  static BaselineCache cache;
  return cache;
}

std::string BaselineCache::key(const TrafficScenario& scenario, const LinkModelParams& link) {
  return sha256_hex(fmt::format("seed={}\n{}\n{}", scenario.seed, scenario.to_csv(), link.to_config()));
}

std::optional<double> BaselineCache::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void BaselineCache::put(const std::string& key, double mean_bitrate_bps) {
  std::lock_guard lock(mu_);
  entries_[key] = mean_bitrate_bps;
}

std::size_t BaselineCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

void BaselineCache::clear() {
  std::lock_guard lock(mu_);
  entries_.clear();
}

double baseline_bitrate(const TrafficScenario& scenario, const LinkModelParams& link,
                        BaselineCache& cache) {
  const auto key = BaselineCache::key(scenario, link);
  if (auto hit = cache.get(key)) return *hit;
  const auto records = jam_free_records(scenario, link);
  const double mean = summarize(records).mean_bitrate_bps;
  cache.put(key, mean);
  return mean;
}

LoopResult run_virtual_loop(const TrafficScenario& scenario, const ExperimentConfig& cfg,
                            const StrategyConfig& strategy) {
  const SessionClock clock;
  SdlStore store;
  Simulator sim(scenario, cfg.link);
  JammerController jammer(strategy, BudgetState{cfg.budget, sim.total_ticks(), 0}, clock);
  Relay relay(std::make_unique<CallbackRelayLink>(
      [&jammer](std::string_view line) { jammer.ingest_line(line); }));
  Consumer consumer(relay, "in-process");

  ProducerConfig pc;
  pc.cell = {cfg.link.pci, cfg.link.carrier_id};
  pc.clock = clock;
  pc.require_client_identity = false;
  Producer producer(store, pc, [&consumer](const std::string&, const std::string& body) {
    return consumer.handle_notify(body).status / 100 == 2;
  });
  const HttpTransport transport = [&producer](const std::string& method, const Url& url,
                                              const std::string& body) -> std::optional<HttpReply> {
    return producer.handle(make_api_request(method, url.path, body, std::string(kTestModeIdentity)));
  };
  consumer.subscribe("http://producer.local", subscription_for(cfg, "http://consumer.local/notify"),
                     transport);

  LoopResult out;
  while (!sim.done()) {
    const auto t = sim.next_tick();
    const auto d = jammer.decide(t);
    auto rec = sim.advance(d.verdict == Verdict::Jam);
    store.put_sample(cell_of(rec.sample), rec.sample);
    producer.dispatch(static_cast<double>(t));
    relay.pump();
    out.records.push_back(std::move(rec));
  }
  out.decisions = jammer.log();
  return out;
}

LoopResult run_live_loop(const TrafficScenario& scenario, const ExperimentConfig& cfg,
                         const StrategyConfig& strategy) {
  const SessionClock clock;
  SdlStore store;
  Simulator sim(scenario, cfg.link);
  JammerController jammer(strategy, BudgetState{cfg.budget, sim.total_ticks(), 0}, clock);

  ProducerConfig pc;
  pc.cell = {cfg.link.pci, cfg.link.carrier_id};
  pc.clock = clock;
  // Listeners are bound up front so the consumer knows where to relay; the
  // jammer starts serving only after the consumer is up.
  JammerService jammer_svc(jammer, cfg.host, 0, 0);
  ProducerService producer_svc(store, pc, cfg.tls);
  const auto producer_url = producer_svc.start(cfg.host, 0);
  ConsumerService consumer_svc(cfg.tls, cfg.host, jammer_svc.relay_port());
  const auto notify_url = consumer_svc.start(cfg.host, 0);
  jammer_svc.start();
  spdlog::info("live loop: producer {}, consumer {}, jammer relay {} control {}", producer_url,
               notify_url, jammer_svc.relay_port(), jammer_svc.control_port());

  consumer_svc.consumer().subscribe(producer_url, subscription_for(cfg, notify_url),
                                    http_transport(cfg.tls));
  ControlClient control(cfg.host, jammer_svc.control_port());

  LoopResult out;
  const auto verdict_timeout = std::chrono::milliseconds(5000) + cfg.tick_duration;
  while (!sim.done()) {
    const auto started = std::chrono::steady_clock::now();
    const auto t = sim.next_tick();
    const auto verdict = control.request(t, verdict_timeout);
    auto rec = sim.advance(verdict == Verdict::Jam);
    store.put_sample(cell_of(rec.sample), rec.sample);
    producer_svc.dispatcher().advance_to(static_cast<double>(t));
    out.records.push_back(std::move(rec));
    std::this_thread::sleep_until(started + cfg.tick_duration);
  }
  producer_svc.dispatcher().drain();

  try {
    consumer_svc.consumer().unsubscribe(producer_url, http_transport(cfg.tls));
  } catch (const std::exception& e) {
    spdlog::warn("live loop: unsubscribe failed: {}", e.what());
  }
  jammer_svc.stop();
  consumer_svc.stop();
  producer_svc.stop();
  out.decisions = jammer.log();
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto scenario = cfg.build_scenario();
  const auto strategy = resolve_strategy(cfg);
  const double baseline = baseline_bitrate(scenario, cfg.link);

  auto loop = cfg.mode == RunMode::Virtual ? run_virtual_loop(scenario, cfg, strategy)
                                           : run_live_loop(scenario, cfg, strategy);
  const auto agg = summarize(loop.records);

  MetricsReport r;
  r.scenario = std::string(to_string(cfg.scenario));
  r.seed = cfg.seed;
  r.strategy = strategy.label();
  r.budget = cfg.budget;
  r.mode = std::string(to_string(cfg.mode));
  r.mean_bler_pct = agg.mean_bler_pct;
  r.mean_snr_db = agg.mean_snr_db;
  r.mean_bitrate_bps = agg.mean_bitrate_bps;
  r.baseline_bitrate_bps = baseline;
  r.bitrate_drop_pct = bitrate_drop(baseline, agg.mean_bitrate_bps);
  r.total_ticks = static_cast<std::int64_t>(loop.records.size());
  r.jam_ticks = std::count_if(loop.decisions.begin(), loop.decisions.end(),
                              [](const JamDecision& d) { return d.verdict == Verdict::Jam; });
  r.budget_limit = BudgetState{cfg.budget, r.total_ticks, 0}.limit();
  r.active_time_pct = 100.0 * static_cast<double>(r.jam_ticks) / static_cast<double>(r.total_ticks);
  r.records = std::move(loop.records);
  r.decisions = std::move(loop.decisions);
  r.cdfs = agg.cdfs;

  if (!cfg.output_dir.empty()) write_report(r, cfg.output_dir);
  return r;
}

std::vector<Vec4> collect_training_set(const ExperimentConfig& cfg) {
  std::vector<Vec4> rows;
  for (const auto& r : jam_free_records(cfg.build_scenario(), cfg.link)) {
    rows.push_back(features_of(r.sample).as_array());
  }
  return rows;
}

ClusterModel profile_phase(const ExperimentConfig& cfg) {
  const auto rows = collect_training_set(cfg);
  try {
    return fit_model(rows, cfg.eps, cfg.min_pts);
  } catch (const NoValidClusters& e) {
    throw NoValidClusters(fmt::format(
        "{} (eps={}, min_pts={}); try a larger eps, e.g. `y1jamlab profile --sweep 0.2,0.3,0.5`",
        e.what(), cfg.eps, cfg.min_pts));
  }
}

SweepTable budget_sweep(const ExperimentConfig& cfg, std::span<const double> budgets,
                        std::span<const std::string> strategies) {
  SweepTable table;
  const auto scenario = cfg.build_scenario();
  const auto clear = summarize(jam_free_records(scenario, cfg.link));
  table.baseline_bitrate_bps = clear.mean_bitrate_bps;
  table.baseline_bler_pct = clear.mean_bler_pct;
  if (budgets.empty() || strategies.empty()) return table;

  std::shared_ptr<const ClusterModel> model = cfg.strategy.model;
  const bool needs_model = std::any_of(strategies.begin(), strategies.end(),
                                       [](const std::string& s) { return s != "random"; });
  if (needs_model && !model) {
    ExperimentConfig probe = cfg;
    probe.strategy.kind = StrategyKind::Clustering;
    probe.targets.reset();
    model = resolve_strategy(probe).model;
  }

  for (double b : budgets) {
    for (const auto& name : strategies) {
      ExperimentConfig run = cfg;
      run.budget = b;
      run.output_dir.clear();
      if (!cfg.output_dir.empty()) {
        run.output_dir = cfg.output_dir / fmt::format("budget_{:g}", b * 100.0) / name;
      }
      run.strategy = StrategyConfig{};
      run.strategy.rng_seed = cfg.seed;
      run.targets.reset();
      if (name == "random") {
        run.strategy.kind = StrategyKind::Random;
        run.strategy.duty_p = b;
      } else {
        auto cls = parse_traffic_class(name);
        if (!cls || *cls == TrafficClass::Idle) {
          throw ConfigError("sweep strategy must be random, low, medium or high; got '" + name + "'");
        }
        run.strategy.kind = StrategyKind::Clustering;
        run.strategy.model = model;
        run.targets = std::vector<TrafficClass>{*cls};
      }
      auto rep = run_experiment(run);
      table.rows.push_back({b, name, rep.mean_bitrate_bps, rep.bitrate_drop_pct, rep.mean_bler_pct,
                            rep.jam_ticks, rep.budget_limit.value_or(rep.total_ticks)});
      table.decisions.push_back(std::move(rep.decisions));
    }
  }
  return table;
}

void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf) {
  out << "value,cumulative_fraction\n";
  for (const auto& p : cdf) out << fmt::format("{},{}\n", p.value, p.fraction);
}

void write_report(const MetricsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("report.json");
    f << report.summary_json().dump(2) << '\n';
  }
  {
    auto f = open("perticks.csv");
    f << "tick,offered_rate_bps,jammed,snr_db," << csv_header() << '\n';
    for (const auto& r : report.records) {
      f << fmt::format("{},{},{},{},{}\n", r.tick, r.offered_rate_bps, r.jammed ? 1 : 0, r.snr_db,
                       to_csv_row(r.sample));
    }
  }
  for (const auto& [name, cdf] : report.cdfs) {
    const auto file = "cdf_" + name + ".csv";
    auto f = open(file.c_str());
    write_cdf_csv(f, cdf);
  }
  {
    auto f = open("decisions.csv");
    write_decision_log(f, report.decisions);
  }
}

std::string session_table_markdown(std::span<const json> summaries) {
  std::string out =
      "| Strategy | BLER (%) | SNR (dB) | Bitrate (bps) | Bitrate Drop (%) | Active Time (%) |\n"
      "|---|---|---|---|---|---|\n";
  for (const auto& s : summaries) {
    out += fmt::format("| {} | {:.2f} | {:.2f} | {:.1f} | {:.1f} | {:.1f} |\n",
                       s.at("strategy").get<std::string>(), s.at("mean_bler_pct").get<double>(),
                       s.at("mean_snr_db").get<double>(), s.at("mean_bitrate_bps").get<double>(),
                       s.at("bitrate_drop_pct").get<double>(), s.at("active_time_pct").get<double>());
  }
  return out;
}

namespace {

std::vector<double> sweep_budgets(const SweepTable& t) {
  std::vector<double> b;
  for (const auto& r : t.rows) {
    if (std::find(b.begin(), b.end(), r.budget) == b.end()) b.push_back(r.budget);
  }
  return b;
}

std::vector<std::string> sweep_strategies(const SweepTable& t) {
  std::vector<std::string> s;
  for (const auto& r : t.rows) {
    if (std::find(s.begin(), s.end(), r.strategy) == s.end()) s.push_back(r.strategy);
  }
  return s;
}

const SweepRow* find_row(const SweepTable& t, double b, const std::string& s) {
  for (const auto& r : t.rows) {
    if (r.budget == b && r.strategy == s) return &r;
  }
  return nullptr;
}

}  // namespace

std::string sweep_table_markdown(const SweepTable& t) {
  const auto budgets = sweep_budgets(t);
  const auto strategies = sweep_strategies(t);
  std::string out = "| Strategy |";
  std::string rule = "|---|";
  for (double b : budgets) {
    out += fmt::format(" {0:g}% Bitrate | {0:g}% Drop (%) | {0:g}% BLER |", b * 100.0);
    rule += "---|---|---|";
  }
  out += "\n" + rule + "\n| No Jammer |";
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    out += fmt::format(" {:.0f} | -- | {:.2f} |", t.baseline_bitrate_bps, t.baseline_bler_pct);
  }
  out += '\n';
  for (const auto& s : strategies) {
    out += "| " + s + " |";
    for (double b : budgets) {
      const auto* r = find_row(t, b, s);
      out += r ? fmt::format(" {:.0f} | {:.1f} | {:.2f} |", r->mean_bitrate_bps, r->bitrate_drop_pct,
                             r->mean_bler_pct)
               : std::string(" | | |");
    }
    out += '\n';
  }
  return out;
}

std::string sweep_table_csv(const SweepTable& t) {
  std::string out = "budget,strategy,mean_bitrate_bps,bitrate_drop_pct,mean_bler_pct,jam_ticks,budget_limit\n";
  out += fmt::format(",baseline,{},0,{},0,\n", t.baseline_bitrate_bps, t.baseline_bler_pct);
  for (const auto& r : t.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.budget, r.strategy, r.mean_bitrate_bps,
                       r.bitrate_drop_pct, r.mean_bler_pct, r.jam_ticks, r.budget_limit);
  }
  return out;
}

json sweep_table_json(const SweepTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"budget", r.budget},
                    {"strategy", r.strategy},
                    {"mean_bitrate_bps", r.mean_bitrate_bps},
                    {"bitrate_drop_pct", r.bitrate_drop_pct},
                    {"mean_bler_pct", r.mean_bler_pct},
                    {"jam_ticks", r.jam_ticks},
                    {"budget_limit", r.budget_limit}});
  }
  return json{{"baseline_bitrate_bps", t.baseline_bitrate_bps},
              {"baseline_bler_pct", t.baseline_bler_pct},
              {"rows", rows}};
}

}  // namespace y1jam
