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

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "y1jam/analytics.hpp"
#include "y1jam/config.hpp"

namespace y1jam {

/// Contiguous run of ticks with one offered downlink rate. Rate 0 is idle.
struct Segment {
  std::int64_t duration_s = 0;
  std::int64_t offered_rate_bps = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct TrafficScenario {
  std::vector<Segment> segments;
  std::uint64_t seed = 0;
  std::int64_t total_s = 0;

  /// Throws ConfigError when the segment durations do not add up to total_s
  /// or a segment is malformed.
  void validate() const;

  std::vector<std::int64_t> per_tick_rates() const;
  std::int64_t active_ticks() const;

  /// `tick,offered_rate_bps` with a header row.
  std::string to_csv() const;

  /// Reads `seed` plus repeated `segment = <duration_s> <rate_bps>` lines.
  static TrafficScenario from_config(const KeyValueConfig& cfg);

  friend bool operator==(const TrafficScenario&, const TrafficScenario&) = default;
};

/// Generator settings for the fixed-rate on/off scenario.
struct OnOffOptions {
  std::int64_t total_s = 270;
  double active_fraction = 0.754;
  std::int64_t rate_bps = 4'000'000;
  std::int64_t min_segment_s = 5;
  std::int64_t max_segment_s = 20;

  static OnOffOptions from_config(const KeyValueConfig& cfg);
};

/// Single 4 Mbps class alternating with idle gaps; 204 of 270 ticks active.
TrafficScenario scenario_part_a(std::uint64_t seed, const OnOffOptions& options = {});

inline constexpr std::uint64_t kPartBDefaultSeed = 7;

/// Four-class multi-rate scenario over 220 ticks, interleaved in 10-tick
/// round-robin blocks. The seed only drives link jitter; the segment layout
/// is fixed.
TrafficScenario scenario_part_b(std::uint64_t seed = kPartBDefaultSeed);

/// Parameters of the two-state (clear/jammed) link model.
///
/// The defaults reproduce the clear-channel and always-on measurements of
/// the reference testbed: 19.6 dB / 0.7 % BLER / 3.949 Mbps at 4 Mbps offered
/// when clear, and 8.7 dB / 64.3 % BLER / 2.155 Mbps when jammed.
struct LinkModelParams {
  double snr_clear_db = 19.6;
  double snr_jam_delta_db = 10.9;
  double bler_clear_pct = 0.7;
  double bler_jam_pct = 64.27;
  double throughput_retain_jam = 0.5386570;  // jammed bitrate / offered rate
  double overhead_factor = 0.98731873;       // clear bitrate / offered rate
  double latency_clear_s = 0.012;
  double latency_jam_s = 0.045;
  double snr_jitter_db = 0.5;
  double bler_jitter_pct = 2.0;
  double rach_rate_clear = 0.02;  // mean RACH attempts per tick
  double rach_rate_jam = 0.25;
  std::int64_t pci = 1;
  std::int64_t carrier_id = 0;
  /// Lower SNR edge (dB) of CQI 1..15.
  std::vector<double> cqi_table = default_cqi_table();
  /// Lower SNR edge (dB) of MCS 1..28.
  std::vector<double> mcs_table = default_mcs_table();

  void validate() const;
  static LinkModelParams from_config(const KeyValueConfig& cfg);
  /// Canonical `key = value` rendering; also the content hashed for caching.
  std::string to_config() const;

  static std::vector<double> default_cqi_table();
  static std::vector<double> default_mcs_table();

  friend bool operator==(const LinkModelParams&, const LinkModelParams&) = default;
};

/// Number of table thresholds at or below `snr_db`: a piecewise-constant,
/// monotone lookup. The table must be nondecreasing.
int index_from_snr(double snr_db, std::span<const double> thresholds);
int cqi_from_snr(double snr_db, std::span<const double> table);
int mcs_from_snr(double snr_db, std::span<const double> table);

struct StepResult {
  AnalyticsSample sample;
  double snr_db = 0.0;  // ground truth at the base station; not exported over Y1
};

/// Produces one tick of analytics. Draws a fixed number of variates from
/// `rng` regardless of state.
StepResult step(const LinkModelParams& params, std::int64_t offered_rate_bps, bool jam_active,
                std::int64_t tick, std::mt19937_64& rng);

/// Per-tick generator state derived from (seed, tick) so that jitter at a
/// given tick does not depend on the decisions taken before it.
std::mt19937_64 tick_rng(std::uint64_t seed, std::int64_t tick);

struct TickRecord {
  std::int64_t tick = 0;
  std::int64_t offered_rate_bps = 0;
  bool jammed = false;
  double snr_db = 0.0;
  AnalyticsSample sample;

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

/// Discrete-time RAN cell driven by a scenario, one second per tick.
class Simulator {
 public:
  Simulator(TrafficScenario scenario, LinkModelParams params);

  bool done() const { return next_tick_ >= static_cast<std::int64_t>(rates_.size()); }
  std::int64_t next_tick() const { return next_tick_; }
  std::int64_t total_ticks() const { return static_cast<std::int64_t>(rates_.size()); }
  const TrafficScenario& scenario() const { return scenario_; }
  const LinkModelParams& params() const { return params_; }

  /// Simulates the next tick with the given jammer state.
  TickRecord advance(bool jam_active);

 private:
  TrafficScenario scenario_;
  LinkModelParams params_;
  std::vector<std::int64_t> rates_;
  std::int64_t next_tick_ = 0;
};

}  // namespace y1jam
