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
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "y1jam/config.hpp"
#include "y1jam/profiler.hpp"
#include "y1jam/y1_types.hpp"

namespace y1jam {

enum class Verdict { NoJam, Jam };

std::string_view to_string(Verdict v);

/// `None` never transmits; it is the no-jammer baseline.
enum class StrategyKind { None, AlwaysOn, Random, Threshold, Clustering };

std::string_view to_string(StrategyKind k);
/// Accepts none, always_on, random, threshold, clustering.
std::optional<StrategyKind> parse_strategy_kind(std::string_view text);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::None;
  double theta_bps = 1000.0;
  double duty_p = 0.0;
  /// Ticks per random burst; 1 draws independently every tick.
  std::int64_t burst_len = 1;
  std::shared_ptr<const ClusterModel> model;
  /// Clusters that are left alone; every other cluster is jammed.
  std::set<int> allow_set;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError when the fields required by `kind` are missing or
  /// out of range.
  void validate() const;
  /// Short label for reports, e.g. "threshold" or "clustering[HIGH]".
  std::string label() const;

  /// Keys: strategy, theta, duty_p, burst_len, seed, plus for clustering
  /// model (path) and either allow (indices) or target (HIGH/MEDIUM/LOW list).
  static StrategyConfig from_config(const KeyValueConfig& cfg);
};

/// Allow set that leaves every valid cluster alone except those named in
/// `targets`. Throws ConfigError when a target has no cluster in the model.
std::set<int> target_to_allow(const ClusterModel& model, std::span<const TrafficClass> targets);

/// One relay frame as the jammer sees it.
struct RaiSnapshot {
  std::int64_t tick = 0;
  std::string timestamp;
  nlohmann::json rai_content = nlohmann::json::object();

  std::optional<double> metric(std::string_view canonical_name) const;
};

/// Parses a relay line; the analytics tick is the whole session second of
/// its timestamp. Throws std::invalid_argument when malformed.
RaiSnapshot parse_relay_line(std::string_view line, const SessionClock& clock);

struct StrategyVerdict {
  Verdict verdict = Verdict::NoJam;
  std::string reason;
};

StrategyVerdict decide_always_on();
/// Seeded by (seed, tick), so a tick's draw does not depend on history.
StrategyVerdict decide_random(std::int64_t tick, double duty_p, std::int64_t burst_len,
                              std::uint64_t seed);
StrategyVerdict decide_threshold(const RaiSnapshot* latest, double theta_bps);
StrategyVerdict decide_clustering(const RaiSnapshot* latest, const ClusterModel& model,
                                  const std::set<int>& allow_set);

struct BudgetState {
  std::optional<double> budget_fraction;  // nullopt = unlimited
  std::int64_t total_ticks = 0;
  std::int64_t active_ticks = 0;

  /// ceil(budget_fraction × total_ticks), absorbing representation error in
  /// the product (0.1 × 220 must allow 22, not 23).
  std::optional<std::int64_t> limit() const;
};

struct JamDecision {
  std::int64_t tick = 0;
  Verdict verdict = Verdict::NoJam;
  std::string reason;
  std::optional<RaiSnapshot> snapshot;

  friend bool operator==(const JamDecision& a, const JamDecision& b);
};

/// Passes JAM through while the budget allows and charges it; otherwise
/// NO_JAM with reason "budget-exhausted".
JamDecision budget_gate(std::int64_t tick, const StrategyVerdict& v, BudgetState& state);

/// Analytics older than this many ticks are not acted on.
inline constexpr std::int64_t kMaxHoldTicks = 3;

/// Per-tick decision engine. Relay readers call ingest() from any thread;
/// the simulation clock calls decide() once per tick.
class JammerController {
 public:
  JammerController(StrategyConfig strategy, BudgetState budget, SessionClock clock = SessionClock());

  /// Parses and stores a relay line (last writer wins). Malformed lines are
  /// logged and ignored; returns whether the line was accepted.
  bool ingest_line(std::string_view line);
  void ingest(RaiSnapshot snapshot);

  /// Blocks until analytics for `tick` or later have arrived.
  bool wait_for_analytics(std::int64_t tick, std::chrono::milliseconds timeout);

  /// Decision for `tick` from the latest analytics no more than
  /// kMaxHoldTicks old. Analytics-driven strategies answer NO_JAM "no-data"
  /// before any analytics and "stale-data" once they are too old.
  JamDecision decide(std::int64_t tick);

  std::vector<JamDecision> log() const;
  BudgetState budget() const;
  const StrategyConfig& strategy() const { return strategy_; }

 private:
  StrategyConfig strategy_;
  SessionClock clock_;

  mutable std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  std::optional<RaiSnapshot> latest_;

  mutable std::mutex log_mu_;
  BudgetState budget_;
  std::vector<JamDecision> log_;
};

/// `tick,verdict,reason,cqi,mcs,bitrate_bps,bler_pct,analytics_tick`; metric
/// cells are empty when the snapshot lacks them.
void write_decision_log(std::ostream& out, std::span<const JamDecision> log);

}  // namespace y1jam
