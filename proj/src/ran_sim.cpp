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

#include "y1jam/ran_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace y1jam {

// ---------------------------------------------------------------------------
// Scenarios

void TrafficScenario::validate() const {
  std::int64_t sum = 0;
  for (const auto& seg : segments) {
    if (seg.duration_s <= 0) throw ConfigError("segment duration must be positive");
    if (seg.offered_rate_bps < 0) throw ConfigError("offered rate must be non-negative");
    sum += seg.duration_s;
  }
  if (sum != total_s) {
    throw ConfigError(fmt::format("segment durations sum to {} but total_s is {}", sum, total_s));
  }
}

std::vector<std::int64_t> TrafficScenario::per_tick_rates() const {
  std::vector<std::int64_t> rates;
  rates.reserve(static_cast<std::size_t>(total_s));
  for (const auto& seg : segments) rates.insert(rates.end(), seg.duration_s, seg.offered_rate_bps);
  return rates;
}

std::int64_t TrafficScenario::active_ticks() const {
  std::int64_t n = 0;
  for (const auto& seg : segments) {
    if (seg.offered_rate_bps > 0) n += seg.duration_s;
  }
  return n;
}

std::string TrafficScenario::to_csv() const {
  std::string out = "tick,offered_rate_bps\n";
  std::int64_t tick = 0;
  for (auto rate : per_tick_rates()) out += fmt::format("{},{}\n", tick++, rate);
  return out;
}

TrafficScenario TrafficScenario::from_config(const KeyValueConfig& cfg) {
  TrafficScenario sc;
  sc.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  for (const auto& line : cfg.get_all("segment")) {
    std::istringstream in(line);
    Segment seg;
    if (!(in >> seg.duration_s >> seg.offered_rate_bps)) {
      throw ConfigError(fmt::format("segment: expected '<duration_s> <rate_bps>', got '{}'", line));
    }
    sc.segments.push_back(seg);
    sc.total_s += seg.duration_s;
  }
  if (sc.segments.empty()) throw ConfigError("scenario has no 'segment' entries");
  sc.validate();
  return sc;
}

OnOffOptions OnOffOptions::from_config(const KeyValueConfig& cfg) {
  OnOffOptions o;
  o.total_s = cfg.get_int("total_s", o.total_s);
  o.active_fraction = cfg.get_double("active_fraction", o.active_fraction);
  o.rate_bps = cfg.get_int("rate_bps", o.rate_bps);
  o.min_segment_s = cfg.get_int("min_segment_s", o.min_segment_s);
  o.max_segment_s = cfg.get_int("max_segment_s", o.max_segment_s);
  return o;
}

namespace {

// Splits `total` into `parts` lengths within [lo, hi], each unit placed
// uniformly among the parts that still have room.
std::vector<std::int64_t> random_composition(std::int64_t total, std::int64_t parts,
                                             std::int64_t lo, std::int64_t hi,
                                             std::mt19937_64& rng) {
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(parts), lo);
  std::int64_t remaining = total - parts * lo;
  std::vector<std::size_t> open;
  while (remaining > 0) {
    open.clear();
    for (std::size_t i = 0; i < lengths.size(); ++i) {
      if (lengths[i] < hi) open.push_back(i);
    }
    std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
    ++lengths[open[pick(rng)]];
    --remaining;
  }
  return lengths;
}

bool composable(std::int64_t total, std::int64_t parts, std::int64_t lo, std::int64_t hi) {
  return parts >= 1 && parts * lo <= total && total <= parts * hi;
}

}  // namespace

TrafficScenario scenario_part_a(std::uint64_t seed, const OnOffOptions& o) {
  if (o.min_segment_s <= 0 || o.max_segment_s < o.min_segment_s) {
    throw ConfigError("segment length bounds must satisfy 0 < min <= max");
  }
  const auto active = static_cast<std::int64_t>(std::llround(o.active_fraction * o.total_s));
  const auto idle = o.total_s - active;

  std::mt19937_64 rng(seed);
  TrafficScenario sc;
  sc.seed = seed;
  sc.total_s = o.total_s;

  if (idle == 0 || active == 0) {
    sc.segments.push_back({o.total_s, active > 0 ? o.rate_bps : 0});
    return sc;
  }

  // Segment counts such that the active and idle runs can alternate.
  std::vector<std::pair<std::int64_t, std::int64_t>> candidates;
  for (std::int64_t na = 1; na <= active; ++na) {
    if (!composable(active, na, o.min_segment_s, o.max_segment_s)) continue;
    for (std::int64_t ni = na - 1; ni <= na + 1; ++ni) {
      if (composable(idle, ni, o.min_segment_s, o.max_segment_s)) candidates.emplace_back(na, ni);
    }
  }
  if (candidates.empty()) {
    throw ConfigError("no alternating segment layout fits the requested segment length bounds");
  }
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const auto [n_active, n_idle] = candidates[pick(rng)];

  auto active_lengths = random_composition(active, n_active, o.min_segment_s, o.max_segment_s, rng);
  auto idle_lengths = random_composition(idle, n_idle, o.min_segment_s, o.max_segment_s, rng);

  bool active_first = n_active > n_idle;
  if (n_active == n_idle) active_first = std::bernoulli_distribution(0.5)(rng);

  std::size_t ia = 0;
  std::size_t ii = 0;
  bool next_active = active_first;
  while (ia < active_lengths.size() || ii < idle_lengths.size()) {
    if (next_active) {
      sc.segments.push_back({active_lengths[ia++], o.rate_bps});
    } else {
      sc.segments.push_back({idle_lengths[ii++], 0});
    }
    next_active = !next_active;
  }
  sc.validate();
  return sc;
}

TrafficScenario scenario_part_b(std::uint64_t seed) {
  constexpr std::int64_t kTotal = 220;
  constexpr std::int64_t kBlock = 10;
  const auto share = [](double f) { return static_cast<std::int64_t>(std::llround(f * kTotal)); };

  struct Class {
    std::int64_t rate;
    std::int64_t remaining;
  };
  std::vector<Class> classes = {
      {4'000'000, 0}, {2'000'000, share(0.245)}, {500'000, share(0.245)}, {0, share(0.155)}};
  classes[0].remaining = kTotal - classes[1].remaining - classes[2].remaining - classes[3].remaining;

  TrafficScenario sc;
  sc.seed = seed;
  sc.total_s = kTotal;
  bool any_left = true;
  while (any_left) {
    any_left = false;
    for (auto& c : classes) {
      if (c.remaining == 0) continue;
      const auto len = std::min(kBlock, c.remaining);
      c.remaining -= len;
      if (!sc.segments.empty() && sc.segments.back().offered_rate_bps == c.rate) {
        sc.segments.back().duration_s += len;
      } else {
        sc.segments.push_back({len, c.rate});
      }
      any_left = true;
    }
  }
  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// Link model

std::vector<double> LinkModelParams::default_cqi_table() {
  return {-6.7, -4.7, -2.3, 0.2, 2.4, 4.3, 5.9, 8.1, 10.3, 11.7, 14.1, 16.3, 18.7, 21.0, 22.7};
}

std::vector<double> LinkModelParams::default_mcs_table() {
  // MCS edges coincide with the CQI 13/14 edges so the clear-channel regime
  // maps onto a single (CQI, MCS) pair.
  return {-6.0, -5.0, -4.0, -3.0, -2.0, -1.0, 0.0,  1.0,  2.0,  3.0,  4.0,  5.0,  6.0,  7.0,
          8.0,  9.0,  10.0, 11.0, 12.0, 13.0, 14.0, 15.5, 17.0, 18.7, 21.0, 22.5, 24.0, 26.0};
}

void LinkModelParams::validate() const {
  if (snr_jam_delta_db < 0.0) throw ConfigError("snr_jam_delta_db must be >= 0");
  if (throughput_retain_jam < 0.0 || throughput_retain_jam > 1.0) {
    throw ConfigError("throughput_retain_jam must lie in [0, 1]");
  }
  if (overhead_factor < 0.0 || overhead_factor > 1.0) {
    throw ConfigError("overhead_factor must lie in [0, 1]");
  }
  if (bler_jam_pct < 0.0 || bler_jam_pct > 100.0 || bler_clear_pct < 0.0 || bler_clear_pct > 100.0) {
    throw ConfigError("BLER percentages must lie in [0, 100]");
  }
  if (latency_clear_s < 0.0 || latency_jam_s < 0.0) throw ConfigError("latency must be >= 0");
  if (snr_jitter_db < 0.0 || bler_jitter_pct < 0.0) throw ConfigError("jitter must be >= 0");
  if (rach_rate_clear < 0.0 || rach_rate_jam < 0.0) throw ConfigError("RACH rates must be >= 0");
  if (cqi_table.size() != 15) throw ConfigError("cqi_table needs 15 thresholds");
  if (mcs_table.size() != 28) throw ConfigError("mcs_table needs 28 thresholds");
  if (!std::is_sorted(cqi_table.begin(), cqi_table.end())) throw ConfigError("cqi_table not monotone");
  if (!std::is_sorted(mcs_table.begin(), mcs_table.end())) throw ConfigError("mcs_table not monotone");
}

LinkModelParams LinkModelParams::from_config(const KeyValueConfig& cfg) {
  LinkModelParams p;
  p.snr_clear_db = cfg.get_double("snr_clear_db", p.snr_clear_db);
  p.snr_jam_delta_db = cfg.get_double("snr_jam_delta_db", p.snr_jam_delta_db);
  p.bler_clear_pct = cfg.get_double("bler_clear_pct", p.bler_clear_pct);
  p.bler_jam_pct = cfg.get_double("bler_jam_pct", p.bler_jam_pct);
  p.throughput_retain_jam = cfg.get_double("throughput_retain_jam", p.throughput_retain_jam);
  p.overhead_factor = cfg.get_double("overhead_factor", p.overhead_factor);
  p.latency_clear_s = cfg.get_double("latency_clear_s", p.latency_clear_s);
  p.latency_jam_s = cfg.get_double("latency_jam_s", p.latency_jam_s);
  p.snr_jitter_db = cfg.get_double("snr_jitter_db", p.snr_jitter_db);
  p.bler_jitter_pct = cfg.get_double("bler_jitter_pct", p.bler_jitter_pct);
  p.rach_rate_clear = cfg.get_double("rach_rate_clear", p.rach_rate_clear);
  p.rach_rate_jam = cfg.get_double("rach_rate_jam", p.rach_rate_jam);
  p.pci = cfg.get_int("pci", p.pci);
  p.carrier_id = cfg.get_int("carrier_id", p.carrier_id);
  if (cfg.contains("cqi_table")) p.cqi_table = cfg.get_double_list("cqi_table");
  if (cfg.contains("mcs_table")) p.mcs_table = cfg.get_double_list("mcs_table");
  p.validate();
  return p;
}

std::string LinkModelParams::to_config() const {
  const auto list = [](const std::vector<double>& v) { return fmt::format("{}", fmt::join(v, ",")); };
  std::string out;
  out += fmt::format("snr_clear_db = {}\n", snr_clear_db);
  out += fmt::format("snr_jam_delta_db = {}\n", snr_jam_delta_db);
  out += fmt::format("bler_clear_pct = {}\n", bler_clear_pct);
  out += fmt::format("bler_jam_pct = {}\n", bler_jam_pct);
  out += fmt::format("throughput_retain_jam = {}\n", throughput_retain_jam);
  out += fmt::format("overhead_factor = {}\n", overhead_factor);
  out += fmt::format("latency_clear_s = {}\n", latency_clear_s);
  out += fmt::format("latency_jam_s = {}\n", latency_jam_s);
  out += fmt::format("snr_jitter_db = {}\n", snr_jitter_db);
  out += fmt::format("bler_jitter_pct = {}\n", bler_jitter_pct);
  out += fmt::format("rach_rate_clear = {}\n", rach_rate_clear);
  out += fmt::format("rach_rate_jam = {}\n", rach_rate_jam);
  out += fmt::format("pci = {}\n", pci);
  out += fmt::format("carrier_id = {}\n", carrier_id);
  out += fmt::format("cqi_table = {}\n", list(cqi_table));
  out += fmt::format("mcs_table = {}\n", list(mcs_table));
  return out;
}

int index_from_snr(double snr_db, std::span<const double> thresholds) {
  return static_cast<int>(std::upper_bound(thresholds.begin(), thresholds.end(), snr_db) -
                          thresholds.begin());
}

int cqi_from_snr(double snr_db, std::span<const double> table) {
  return std::clamp(index_from_snr(snr_db, table), 0, 15);
}

int mcs_from_snr(double snr_db, std::span<const double> table) {
  return std::clamp(index_from_snr(snr_db, table), 0, 28);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Inverse-CDF Poisson sample from one uniform variate; small means only.
std::int64_t poisson_from_uniform(double mean, double u) {
  if (mean <= 0.0) return 0;
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf && k < 64) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace

std::mt19937_64 tick_rng(std::uint64_t seed, std::int64_t tick) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tick))));
}

StepResult step(const LinkModelParams& p, std::int64_t offered_rate_bps, bool jam_active,
                std::int64_t tick, std::mt19937_64& rng) {
  // Fixed draw order: SNR jitter, BLER jitter, RACH uniform.
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const double snr_noise = unit_normal(rng);
  const double bler_noise = unit_normal(rng);
  const double rach_u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

  const bool active = offered_rate_bps > 0;
  const double offered = static_cast<double>(offered_rate_bps);

  StepResult r;
  r.snr_db = p.snr_clear_db - (jam_active ? p.snr_jam_delta_db : 0.0) + p.snr_jitter_db * snr_noise;

  auto& s = r.sample;
  s.tick = tick;
  s.dl_cqi = cqi_from_snr(r.snr_db, p.cqi_table);
  s.dl_mcs = mcs_from_snr(r.snr_db, p.mcs_table);
  if (!active) {
    // No scheduled transport blocks: nothing to lose and nothing delivered.
    s.dl_bitrate_bps = 0.0;
    s.dl_bler_pct = 0.0;
  } else if (jam_active) {
    s.dl_bitrate_bps = p.throughput_retain_jam * offered;
    s.dl_bler_pct = std::clamp(p.bler_jam_pct + p.bler_jitter_pct * bler_noise, 0.0, 100.0);
  } else {
    s.dl_bitrate_bps = p.overhead_factor * offered;
    s.dl_bler_pct = p.bler_clear_pct;
  }
  s.dl_latency_s = active ? (jam_active ? p.latency_jam_s : p.latency_clear_s) : 0.0;
  s.dl_bytes = std::llround(s.dl_bitrate_bps / 8.0);
  s.pci = p.pci;
  s.carrier_id = p.carrier_id;
  s.num_rach = poisson_from_uniform(jam_active ? p.rach_rate_jam : p.rach_rate_clear, rach_u);
  return r;
}

// ---------------------------------------------------------------------------
// Simulator

Simulator::Simulator(TrafficScenario scenario, LinkModelParams params)
    : scenario_(std::move(scenario)), params_(std::move(params)) {
  scenario_.validate();
  params_.validate();
  rates_ = scenario_.per_tick_rates();
}

TickRecord Simulator::advance(bool jam_active) {
  if (done()) throw std::out_of_range("simulation already finished");
  const auto tick = next_tick_++;
  auto rng = tick_rng(scenario_.seed, tick);
  const auto rate = rates_[static_cast<std::size_t>(tick)];
  auto r = step(params_, rate, jam_active, tick, rng);
  return TickRecord{tick, rate, jam_active, r.snr_db, r.sample};
}

}  // namespace y1jam
