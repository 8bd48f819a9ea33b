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

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "y1jam/config.hpp"
#include "y1jam/eval.hpp"
#include "y1jam/jammer.hpp"
#include "y1jam/live.hpp"
#include "y1jam/profiler.hpp"
#include "y1jam/ran_sim.hpp"

namespace fs = std::filesystem;
using namespace y1jam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

/// Flag values layered over an optional `--config` file; flags win.
struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  KeyValueConfig build() const {
    KeyValueConfig cfg = config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(config_path);
    for (const auto& [k, v] : values) cfg.set(k, v);
    return cfg;
  }
};

void add_scenario_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "key = value config file");
  o.add(app, "--scenario", "scenario", "part_a | part_b");
  o.add(app, "--seed", "seed", "Scenario / jitter seed");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& cell : split(text, ',')) {
    if (cell.empty()) continue;
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError("'" + cell + "' is not a number");
    }
  }
  return out;
}

int cmd_run(const Overrides& o, int repeat) {
  auto kv = o.build();
  auto base = ExperimentConfig::from_config(kv);
  for (int i = 0; i < repeat; ++i) {
    auto cfg = base;
    if (repeat > 1) {
      cfg.seed = base.seed + static_cast<std::uint64_t>(i);
      cfg.strategy.rng_seed = cfg.seed;
      if (!base.output_dir.empty()) cfg.output_dir = base.output_dir / fmt::format("run_{}", i);
    }
    const auto report = run_experiment(cfg);
    std::cout << report.summary_json().dump() << '\n';
  }
  if (!base.output_dir.empty()) {
    std::cerr << "report written to " << base.output_dir.string() << '\n';
  }
  return kExitOk;
}

int cmd_profile(const Overrides& o, const std::string& out, const std::string& sweep,
                const std::string& train_out, const std::string& train_in) {
  auto cfg = ExperimentConfig::from_config(o.build());
  std::vector<Vec4> rows;
  if (!train_in.empty()) {
    std::ifstream in(train_in);
    if (!in) throw ConfigError("cannot read " + train_in);
    rows = read_training_csv(in);
  } else {
    rows = collect_training_set(cfg);
  }
  if (!train_out.empty()) {
    std::ofstream f(train_out);
    write_training_csv(f, rows);
  }
  if (!sweep.empty()) {
    const auto eps = parse_list(sweep);
    std::cout << "eps,clusters,noise\n";
    for (const auto& r : eps_sweep(rows, eps, cfg.min_pts)) {
      std::cout << fmt::format("{},{},{}\n", r.eps, r.clusters, r.noise);
    }
    if (out.empty()) return kExitOk;
  }
  auto model = fit_model(rows, cfg.eps, cfg.min_pts);
  std::cout << fmt::format("{} samples, {} clusters:", rows.size(), model.centroids.size());
  for (const auto& [idx, cls] : model.labels_semantic) {
    const auto raw = model.standardizer.inverse(model.centroids[static_cast<std::size_t>(idx)]);
    std::cout << fmt::format(" {}={} ({:.0f} bps)", idx, to_string(cls), raw[2]);
  }
  std::cout << '\n';
  if (!out.empty()) {
    model.save(out);
    std::cerr << "model written to " << out << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const Overrides& o, const std::string& budgets_text, const std::string& strategies_text,
              const std::string& format) {
  auto kv = o.build();
  if (!kv.contains("scenario")) kv.set("scenario", "part_b");
  auto cfg = ExperimentConfig::from_config(kv);
  if (!cfg.model_path) cfg.profile_first = true;
  auto budgets = parse_list(budgets_text);
  for (auto& b : budgets) {
    if (b > 1.0) b /= 100.0;
  }
  std::vector<std::string> strategies;
  for (const auto& s : split(strategies_text, ',')) {
    if (!s.empty()) strategies.push_back(s);
  }
  const auto table = budget_sweep(cfg, budgets, strategies);
  if (format == "csv") {
    std::cout << sweep_table_csv(table);
  } else if (format == "json") {
    std::cout << sweep_table_json(table).dump(2) << '\n';
  } else {
    std::cout << sweep_table_markdown(table);
  }
  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    std::ofstream(cfg.output_dir / "sweep.json") << sweep_table_json(table).dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
  if (!fs::is_directory(in_dir)) throw ConfigError("no such directory: " + in_dir);
  std::vector<nlohmann::json> summaries;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(in_dir)) {
    if (e.is_regular_file() && e.path().filename() == "report.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    summaries.push_back(nlohmann::json::parse(in));
  }
  if (summaries.empty()) throw ConfigError("no report.json found under " + in_dir);
  if (format == "json") {
    std::cout << nlohmann::json(summaries).dump(2) << '\n';
  } else if (format == "csv") {
    std::cout << "strategy,scenario,seed,budget,mean_bler_pct,mean_snr_db,mean_bitrate_bps,"
                 "bitrate_drop_pct,active_time_pct\n";
    for (const auto& s : summaries) {
      std::cout << fmt::format("{},{},{},{},{},{},{},{},{}\n", s.at("strategy").get<std::string>(),
                               s.at("scenario").get<std::string>(), s.at("seed").get<std::uint64_t>(),
                               s.at("budget").is_null() ? std::string() : s.at("budget").dump(),
                               s.at("mean_bler_pct").get<double>(), s.at("mean_snr_db").get<double>(),
                               s.at("mean_bitrate_bps").get<double>(),
                               s.at("bitrate_drop_pct").get<double>(),
                               s.at("active_time_pct").get<double>());
    }
  } else {
    std::cout << session_table_markdown(summaries);
  }
  return kExitOk;
}

int cmd_producer(const Overrides& o, const std::string& listen, const std::string& control,
                 int tick_ms) {
  auto cfg = ExperimentConfig::from_config(o.build());
  const auto [host, port] = parse_endpoint(listen);
  SdlStore store;
  ProducerConfig pc;
  pc.cell = {cfg.link.pci, cfg.link.carrier_id};
  ProducerService svc(store, pc, cfg.tls);
  std::cerr << "producer listening on " << svc.start(host, port) << '\n';
  std::optional<ControlClient> ctl;
  if (!control.empty()) {
    const auto [chost, cport] = parse_endpoint(control);
    ctl.emplace(chost, cport);
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  Simulator sim(cfg.build_scenario(), cfg.link);
  while (!sim.done() && !g_interrupted) {
    const auto started = std::chrono::steady_clock::now();
    const auto t = sim.next_tick();
    const bool jam = ctl && ctl->request(t, std::chrono::milliseconds(tick_ms + 5000)) == Verdict::Jam;
    const auto rec = sim.advance(jam);
    store.put_sample(cell_of(rec.sample), rec.sample);
    svc.dispatcher().advance_to(static_cast<double>(t));
    std::this_thread::sleep_until(started + std::chrono::milliseconds(tick_ms));
  }
  svc.dispatcher().drain();
  return kExitOk;
}

int cmd_consumer(const std::string& producer_url, double period, const std::string& relay_endpoint,
                 const std::string& metrics_filter, const std::string& listen) {
  auto tls = TlsConfig::from_env();
  const auto [rhost, rport] = parse_endpoint(relay_endpoint);
  const auto [host, port] = parse_endpoint(listen);
  ConsumerService svc(tls, rhost, rport);
  const auto notify_url = svc.start(host, port);
  std::cerr << "consumer serving " << notify_url << '\n';

  SubscriptionRequest req;
  req.rai_type = kRaiTypePerformance;
  req.rai_type_version = "1.0";
  req.criteria.period_s = period;
  req.notification_target_address = notify_url;
  for (const auto& m : split(metrics_filter, ',')) {
    if (!m.empty()) req.metrics_filter.push_back(m);
  }
  const auto id = svc.consumer().subscribe(producer_url, req, http_transport(tls));
  std::cerr << "subscribed as " << id << '\n';
  wait_for_signal();
  try {
    svc.consumer().unsubscribe(producer_url, http_transport(tls));
  } catch (const std::exception& e) {
    spdlog::warn("unsubscribe failed: {}", e.what());
  }
  return kExitOk;
}

int cmd_jammer(const Overrides& o, const std::string& relay_listen, const std::string& control_listen,
               std::int64_t total_ticks, const std::string& decisions_out) {
  auto cfg = ExperimentConfig::from_config(o.build());
  auto strategy = cfg.strategy;
  if (strategy.kind == StrategyKind::Clustering) {
    if (!cfg.model_path) throw ModelMissing("clustering strategy needs --model");
    strategy.model = std::make_shared<const ClusterModel>(ClusterModel::load(*cfg.model_path));
    if (cfg.targets) strategy.allow_set = target_to_allow(*strategy.model, *cfg.targets);
  }
  const auto [rhost, rport] = parse_endpoint(relay_listen);
  const auto [chost, cport] = parse_endpoint(control_listen);
  if (rhost != chost) throw ConfigError("relay and control must listen on the same host");
  JammerController controller(strategy, BudgetState{cfg.budget, total_ticks, 0});
  JammerService svc(controller, rhost, rport, cport);
  svc.start();
  std::cerr << fmt::format("jammer: relay on {}:{}, control on {}:{}\n", rhost, svc.relay_port(),
                           chost, svc.control_port());
  wait_for_signal();
  svc.stop();
  const auto log = controller.log();
  if (!decisions_out.empty()) {
    std::ofstream f(decisions_out);
    write_decision_log(f, log);
  }
  std::cerr << fmt::format("jammer: {} decisions, {} JAM\n", log.size(), controller.budget().active_ticks);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Y1 analytics-exposure jamming lab"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error");

  // run
  Overrides run_o;
  int repeat = 1;
  auto* run = app.add_subcommand("run", "Run one closed-loop session and write a report");
  add_scenario_options(run, run_o);
  run_o.add(run, "--strategy", "strategy", "none | always_on | random | threshold | clustering");
  run_o.add(run, "--theta", "theta", "Threshold in bps");
  run_o.add(run, "--duty", "duty_p", "Random jam probability per tick");
  run_o.add(run, "--burst-len", "burst_len", "Random burst length in ticks");
  run_o.add(run, "--target", "target", "Clustering targets, e.g. HIGH or HIGH,MEDIUM");
  run_o.add(run, "--allow", "allow", "Clustering allow set as cluster indices");
  run_o.add(run, "--budget", "budget", "Active-time budget (0.25, 25 or 25%)");
  run_o.add(run, "--mode", "mode", "virtual | live");
  run_o.add(run, "--out", "out", "Output directory");
  run_o.add(run, "--model", "model", "Cluster model JSON");
  run_o.add(run, "--tick-ms", "tick_ms", "Live-mode tick duration in ms");
  run_o.add(run, "--period", "period", "Notification period in seconds");
  run_o.add(run, "--metrics-filter", "metrics_filter", "Comma list of metric names");
  run->add_flag_callback("--profile", [&] { run_o.values["profile"] = "1"; },
                         "Train a cluster model on the jam-free trace first");
  run->add_option("--repeat", repeat, "Runs with consecutive seeds")->check(CLI::PositiveNumber);

  // profile
  Overrides prof_o;
  std::string prof_out, prof_sweep, prof_train_out, prof_train_in;
  auto* profile = app.add_subcommand("profile", "Train a cluster model on a jam-free trace");
  add_scenario_options(profile, prof_o);
  prof_o.add(profile, "--eps", "eps", "DBSCAN radius in standardized units");
  prof_o.add(profile, "--min-pts", "min_pts", "DBSCAN core threshold");
  profile->add_option("--out", prof_out, "Model JSON path");
  profile->add_option("--sweep", prof_sweep, "Comma list of eps values to tabulate");
  profile->add_option("--write-training", prof_train_out, "Also write the training CSV");
  profile->add_option("--training", prof_train_in, "Train from this CSV instead of simulating");

  // sweep
  Overrides sweep_o;
  std::string budgets = "10,15,20,25", strategies = "random,low,medium,high", sweep_format = "md";
  auto* sweep = app.add_subcommand("sweep", "Budget sweep over random and cluster-targeted jammers");
  add_scenario_options(sweep, sweep_o);
  sweep->add_option("--budgets", budgets, "Comma list of budgets in percent");
  sweep->add_option("--strategies", strategies, "Comma list of random, low, medium, high");
  sweep_o.add(sweep, "--model", "model", "Cluster model JSON (profiles first when absent)");
  sweep_o.add(sweep, "--out", "out", "Directory for per-run reports and sweep.json");
  sweep_o.add(sweep, "--eps", "eps", "DBSCAN radius when profiling");
  sweep_o.add(sweep, "--min-pts", "min_pts", "DBSCAN core threshold when profiling");
  sweep->add_option("--format", sweep_format, "md | csv | json")
      ->check(CLI::IsMember({"md", "csv", "json"}));

  // report
  std::string report_in, report_format = "md";
  auto* report = app.add_subcommand("report", "Tabulate report.json files under a directory");
  report->add_option("--in", report_in, "Results directory")->required();
  report->add_option("--format", report_format, "md | csv | json")
      ->check(CLI::IsMember({"md", "csv", "json"}));

  // producer
  Overrides pr_o;
  std::string pr_listen = "127.0.0.1:8443", pr_control;
  int pr_tick_ms = 1000;
  auto* producer = app.add_subcommand("producer", "Simulated cell plus Y1 producer service");
  add_scenario_options(producer, pr_o);
  producer->add_option("--listen", pr_listen, "host:port");
  producer->add_option("--control", pr_control, "Jammer control endpoint host:port");
  producer->add_option("--tick-ms", pr_tick_ms, "Wall-clock tick duration in ms");

  // consumer
  std::string co_url, co_relay = "127.0.0.1:9000", co_filter, co_listen = "127.0.0.1:8444";
  double co_period = 1.0;
  auto* consumer = app.add_subcommand("consumer", "Y1 consumer relaying analytics to a jammer");
  consumer->add_option("--producer-url", co_url, "Producer base URL")->required();
  consumer->add_option("--period", co_period, "Notification period in seconds");
  consumer->add_option("--relay-endpoint", co_relay, "Jammer relay host:port");
  consumer->add_option("--metrics-filter", co_filter, "Comma list of metric names");
  consumer->add_option("--listen", co_listen, "host:port for /notify");

  // jammer
  Overrides ja_o;
  std::string ja_relay = "127.0.0.1:9000", ja_control = "127.0.0.1:9001", ja_log;
  std::int64_t ja_ticks = 270;
  auto* jammer = app.add_subcommand("jammer", "Jammer controller service");
  ja_o.add(jammer, "--strategy", "strategy", "always_on | random | threshold | clustering");
  ja_o.add(jammer, "--theta", "theta", "Threshold in bps");
  ja_o.add(jammer, "--duty", "duty_p", "Random jam probability per tick");
  ja_o.add(jammer, "--target", "target", "Clustering targets");
  ja_o.add(jammer, "--model", "model", "Cluster model JSON");
  ja_o.add(jammer, "--budget", "budget", "Active-time budget");
  ja_o.add(jammer, "--seed", "seed", "Random strategy seed");
  jammer->add_option("--relay-listen", ja_relay, "host:port for the relay stream");
  jammer->add_option("--control-listen", ja_control, "host:port for the control channel");
  jammer->add_option("--total-ticks", ja_ticks, "Session length used for the budget");
  jammer->add_option("--decisions", ja_log, "Write the decision log CSV here on exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(run_o, repeat);
    if (*profile) return cmd_profile(prof_o, prof_out, prof_sweep, prof_train_out, prof_train_in);
    if (*sweep) return cmd_sweep(sweep_o, budgets, strategies, sweep_format);
    if (*report) return cmd_report(report_in, report_format);
    if (*producer) return cmd_producer(pr_o, pr_listen, pr_control, pr_tick_ms);
    if (*consumer) return cmd_consumer(co_url, co_period, co_relay, co_filter, co_listen);
    if (*jammer) return cmd_jammer(ja_o, ja_relay, ja_control, ja_ticks, ja_log);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelMissing& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
