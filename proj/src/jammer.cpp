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

#include "y1jam/jammer.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "y1jam/ran_sim.hpp"

namespace y1jam {

using nlohmann::json;

std::string_view to_string(Verdict v) { return v == Verdict::Jam ? "JAM" : "NO_JAM"; }

std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::None: return "none";
    case StrategyKind::AlwaysOn: return "always_on";
    case StrategyKind::Random: return "random";
    case StrategyKind::Threshold: return "threshold";
    case StrategyKind::Clustering: return "clustering";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view text) {
  for (auto k : {StrategyKind::None, StrategyKind::AlwaysOn, StrategyKind::Random,
                 StrategyKind::Threshold, StrategyKind::Clustering}) {
    if (to_string(k) == text) return k;
  }
  if (text == "always-on" || text == "alwayson") return StrategyKind::AlwaysOn;
  return std::nullopt;
}

void StrategyConfig::validate() const {
  switch (kind) {
    case StrategyKind::None:
    case StrategyKind::AlwaysOn:
      return;
    case StrategyKind::Random:
      if (!(duty_p >= 0.0 && duty_p <= 1.0)) {
        throw ConfigError(fmt::format("duty_p must be in [0,1], got {}", duty_p));
      }
      if (burst_len < 1) throw ConfigError("burst_len must be at least 1");
      return;
    case StrategyKind::Threshold:
      if (!(theta_bps >= 0.0)) throw ConfigError(fmt::format("theta must be >= 0, got {}", theta_bps));
      return;
    case StrategyKind::Clustering:
      if (!model) throw ConfigError("clustering strategy needs a cluster model");
      for (int idx : allow_set) {
        if (idx < 0 || idx >= static_cast<int>(model->centroids.size())) {
          throw ConfigError(fmt::format("allow set names cluster {} but the model has {}", idx,
                                        model->centroids.size()));
        }
      }
      return;
  }
}

std::string StrategyConfig::label() const {
  if (kind != StrategyKind::Clustering || !model) return std::string(to_string(kind));
  std::string targets;
  for (std::size_t j = 0; j < model->centroids.size(); ++j) {
    if (allow_set.count(static_cast<int>(j)) != 0) continue;
    auto it = model->labels_semantic.find(static_cast<int>(j));
    if (!targets.empty()) targets += ',';
    targets += it == model->labels_semantic.end() ? std::to_string(j) : std::string(to_string(it->second));
  }
  return "clustering[" + targets + "]";
}

StrategyConfig StrategyConfig::from_config(const KeyValueConfig& cfg) {
  StrategyConfig s;
  const auto kind_text = cfg.get_string("strategy", "none");
  auto kind = parse_strategy_kind(kind_text);
  if (!kind) throw ConfigError("unknown strategy '" + kind_text + "'");
  s.kind = *kind;
  s.theta_bps = cfg.get_double("theta", s.theta_bps);
  s.duty_p = cfg.get_double("duty_p", s.duty_p);
  s.burst_len = cfg.get_int("burst_len", s.burst_len);
  s.rng_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  if (s.kind == StrategyKind::Clustering) {
    if (!cfg.contains("model")) throw ConfigError("clustering strategy needs 'model = <path>'");
    s.model = std::make_shared<const ClusterModel>(ClusterModel::load(cfg.get_string("model", "")));
    if (cfg.contains("allow")) {
      for (double v : cfg.get_double_list("allow")) s.allow_set.insert(static_cast<int>(v));
    } else {
      std::vector<TrafficClass> targets;
      for (const auto& t : split(cfg.get_string("target", "HIGH"), ',')) {
        auto cls = parse_traffic_class(t);
        if (!cls) throw ConfigError("unknown target class '" + t + "'");
        targets.push_back(*cls);
      }
      s.allow_set = target_to_allow(*s.model, targets);
    }
  }
  s.validate();
  return s;
}

std::set<int> target_to_allow(const ClusterModel& model, std::span<const TrafficClass> targets) {
  std::set<int> allow;
  for (std::size_t j = 0; j < model.centroids.size(); ++j) allow.insert(static_cast<int>(j));
  for (auto t : targets) {
    auto idx = model.index_of(t);
    if (!idx) throw ConfigError(fmt::format("model has no {} cluster", to_string(t)));
    allow.erase(*idx);
  }
  return allow;
}

std::optional<double> RaiSnapshot::metric(std::string_view canonical_name) const {
  auto it = rai_content.find(std::string(canonical_name));
  if (it == rai_content.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

RaiSnapshot parse_relay_line(std::string_view line, const SessionClock& clock) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("relay line is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("timestamp") || !j["timestamp"].is_string()) {
    throw std::invalid_argument("relay line lacks a timestamp");
  }
  RaiSnapshot s;
  s.timestamp = j["timestamp"].get<std::string>();
  s.tick = static_cast<std::int64_t>(std::floor(clock.session_seconds(s.timestamp) + 1e-6));
  if (j.contains("rai_content")) {
    if (!j["rai_content"].is_object()) throw std::invalid_argument("rai_content must be an object");
    s.rai_content = j["rai_content"];
  }
  return s;
}

StrategyVerdict decide_always_on() { return {Verdict::Jam, "always-on"}; }

StrategyVerdict decide_random(std::int64_t tick, double duty_p, std::int64_t burst_len,
                              std::uint64_t seed) {
  const std::int64_t burst_start = burst_len > 1 ? tick - tick % burst_len : tick;
  // Salted so the draws are independent of the link jitter under the same seed.
  auto rng = tick_rng(seed ^ 0x9e3779b97f4a7c15ULL, burst_start);
  const bool jam = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < duty_p;
  return {jam ? Verdict::Jam : Verdict::NoJam, jam ? "random:draw" : "random:skip"};
}

StrategyVerdict decide_threshold(const RaiSnapshot* latest, double theta_bps) {
  if (latest == nullptr) return {Verdict::NoJam, "no-data"};
  auto bitrate = latest->metric("dl_bitrate_bps");
  if (!bitrate) return {Verdict::NoJam, "no-data"};
  if (*bitrate >= theta_bps) return {Verdict::Jam, "threshold:above"};
  return {Verdict::NoJam, "threshold:below"};
}

StrategyVerdict decide_clustering(const RaiSnapshot* latest, const ClusterModel& model,
                                  const std::set<int>& allow_set) {
  if (latest == nullptr) return {Verdict::NoJam, "no-data"};
  auto cqi = latest->metric("dl_cqi");
  auto mcs = latest->metric("dl_mcs");
  auto bitrate = latest->metric("dl_bitrate_bps");
  auto bler = latest->metric("dl_bler_pct");
  if (!cqi || !mcs || !bitrate || !bler) return {Verdict::NoJam, "no-data"};
  const int j = classify({*cqi, *mcs, *bitrate, *bler}, model);
  auto it = model.labels_semantic.find(j);
  const std::string name =
      it == model.labels_semantic.end() ? std::to_string(j) : std::string(to_string(it->second));
  if (allow_set.count(j) != 0) return {Verdict::NoJam, "clustering:allow=" + name};
  return {Verdict::Jam, "clustering:target=" + name};
}

std::optional<std::int64_t> BudgetState::limit() const {
  if (!budget_fraction) return std::nullopt;
  return static_cast<std::int64_t>(
      std::ceil(*budget_fraction * static_cast<double>(total_ticks) - 1e-9));
}

bool operator==(const JamDecision& a, const JamDecision& b) {
  auto snap_eq = [](const std::optional<RaiSnapshot>& x, const std::optional<RaiSnapshot>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->tick == y->tick && x->timestamp == y->timestamp && x->rai_content == y->rai_content;
  };
  return a.tick == b.tick && a.verdict == b.verdict && a.reason == b.reason &&
         snap_eq(a.snapshot, b.snapshot);
}

JamDecision budget_gate(std::int64_t tick, const StrategyVerdict& v, BudgetState& state) {
  JamDecision d{tick, v.verdict, v.reason, std::nullopt};
  if (v.verdict != Verdict::Jam) return d;
  const auto cap = state.limit();
  if (cap && state.active_ticks + 1 > *cap) {
    d.verdict = Verdict::NoJam;
    d.reason = "budget-exhausted";
    return d;
  }
  ++state.active_ticks;
  return d;
}

JammerController::JammerController(StrategyConfig strategy, BudgetState budget, SessionClock clock)
    : strategy_(std::move(strategy)), clock_(clock), budget_(budget) {
  strategy_.validate();
}

bool JammerController::ingest_line(std::string_view line) {
  try {
    ingest(parse_relay_line(line, clock_));
    return true;
  } catch (const std::exception& e) {
    spdlog::warn("jammer: ignoring relay line: {}", e.what());
    return false;
  }
}

void JammerController::ingest(RaiSnapshot snapshot) {
  {
    std::lock_guard lock(slot_mu_);
    latest_ = std::move(snapshot);
  }
  slot_cv_.notify_all();
}

bool JammerController::wait_for_analytics(std::int64_t tick, std::chrono::milliseconds timeout) {
  std::unique_lock lock(slot_mu_);
  return slot_cv_.wait_for(lock, timeout, [&] { return latest_ && latest_->tick >= tick; });
}

JamDecision JammerController::decide(std::int64_t tick) {
  std::optional<RaiSnapshot> snap;
  bool stale = false;
  {
    std::lock_guard lock(slot_mu_);
    if (latest_ && latest_->tick < tick) {
      if (tick - latest_->tick <= kMaxHoldTicks) {
        snap = latest_;
      } else {
        stale = true;
      }
    }
  }

  StrategyVerdict v;
  const RaiSnapshot* rai = snap ? &*snap : nullptr;
  switch (strategy_.kind) {
    case StrategyKind::None:
      v = {Verdict::NoJam, "disabled"};
      break;
    case StrategyKind::AlwaysOn:
      v = decide_always_on();
      break;
    case StrategyKind::Random:
      v = decide_random(tick, strategy_.duty_p, strategy_.burst_len, strategy_.rng_seed);
      break;
    case StrategyKind::Threshold:
      v = stale ? StrategyVerdict{Verdict::NoJam, "stale-data"} : decide_threshold(rai, strategy_.theta_bps);
      break;
    case StrategyKind::Clustering:
      v = stale ? StrategyVerdict{Verdict::NoJam, "stale-data"}
                : decide_clustering(rai, *strategy_.model, strategy_.allow_set);
      break;
  }

  std::lock_guard lock(log_mu_);
  auto d = budget_gate(tick, v, budget_);
  d.snapshot = std::move(snap);
  log_.push_back(d);
  return d;
}

std::vector<JamDecision> JammerController::log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

BudgetState JammerController::budget() const {
  std::lock_guard lock(log_mu_);
  return budget_;
}

void write_decision_log(std::ostream& out, std::span<const JamDecision> log) {
  out << "tick,verdict,reason,cqi,mcs,bitrate_bps,bler_pct,analytics_tick\n";
  auto cell = [](const std::optional<RaiSnapshot>& s, std::string_view name) -> std::string {
    if (!s) return {};
    auto it = s->rai_content.find(std::string(name));
    return it == s->rai_content.end() ? std::string() : it->dump();
  };
  for (const auto& d : log) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", d.tick, to_string(d.verdict), d.reason,
                       cell(d.snapshot, "dl_cqi"), cell(d.snapshot, "dl_mcs"),
                       cell(d.snapshot, "dl_bitrate_bps"), cell(d.snapshot, "dl_bler_pct"),
                       d.snapshot ? std::to_string(d.snapshot->tick) : std::string());
  }
}

}  // namespace y1jam
