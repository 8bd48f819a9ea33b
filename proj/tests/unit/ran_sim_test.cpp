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

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "oracles.hpp"
#include "y1jam/ran_sim.hpp"

using namespace y1jam;

namespace {

std::vector<TickRecord> run(const TrafficScenario& sc, const std::vector<bool>& jam,
                            const LinkModelParams& p = {}) {
  Simulator sim(sc, p);
  std::vector<TickRecord> out;
  for (std::size_t t = 0; !sim.done(); ++t) out.push_back(sim.advance(jam.empty() ? false : jam[t]));
  return out;
}

double mean_active_bitrate(const std::vector<TickRecord>& recs) {
  double sum = 0;
  int n = 0;
  for (const auto& r : recs) {
    if (r.offered_rate_bps > 0) {
      sum += r.sample.dl_bitrate_bps;
      ++n;
    }
  }
  return sum / n;
}

}  // namespace

TEST_CASE("on/off scenario for seed 42") {
  const auto sc = scenario_part_a(42);
  CHECK(sc.total_s == 270);
  CHECK(sc.active_ticks() == 204);
  CHECK_NOTHROW(sc.validate());
  for (const auto& seg : sc.segments) CHECK((seg.offered_rate_bps == 0 || seg.offered_rate_bps == 4'000'000));
  CHECK(sc.to_csv() == scenario_part_a(42).to_csv());
  CHECK(sc == scenario_part_a(42));
}

TEST_CASE("on/off scenario shape holds for any seed") {
  gen::Engine rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto seed = rng();
    const auto sc = scenario_part_a(seed);
    CAPTURE(seed);
    REQUIRE_NOTHROW(sc.validate());
    CHECK(sc.active_ticks() == 204);
    for (std::size_t k = 0; k < sc.segments.size(); ++k) {
      CHECK(sc.segments[k].duration_s >= 5);
      CHECK(sc.segments[k].duration_s <= 20);
      if (k > 0) CHECK((sc.segments[k].offered_rate_bps > 0) != (sc.segments[k - 1].offered_rate_bps > 0));
    }
  }
}

TEST_CASE("on/off options are validated") {
  OnOffOptions o;
  o.min_segment_s = 10;
  o.max_segment_s = 5;
  CHECK_THROWS_AS(scenario_part_a(1, o), ConfigError);
}

TEST_CASE("multi-rate scenario class counts") {
  const auto sc = scenario_part_b();
  CHECK(sc.total_s == 220);
  CHECK(sc == scenario_part_b());
  std::map<std::int64_t, std::int64_t> per_rate;
  for (auto r : sc.per_tick_rates()) ++per_rate[r];
  const auto expect = oracle::part_b_counts(220);
  CHECK(per_rate[4'000'000] == expect[0]);
  CHECK(per_rate[2'000'000] == expect[1]);
  CHECK(per_rate[500'000] == expect[2]);
  CHECK(per_rate[0] == expect[3]);
  CHECK(expect == std::vector<std::int64_t>{78, 54, 54, 34});
  // Round-robin blocks: each class appears in several separate segments.
  std::map<std::int64_t, int> segments_per_rate;
  for (const auto& seg : sc.segments) ++segments_per_rate[seg.offered_rate_bps];
  for (auto [rate, n] : segments_per_rate) CHECK(n >= 3);
}

TEST_CASE("scenario from config") {
  auto cfg = KeyValueConfig::parse("seed = 5\nsegment = 10 4000000\nsegment = 5 0\n");
  const auto sc = TrafficScenario::from_config(cfg);
  CHECK(sc.seed == 5);
  CHECK(sc.total_s == 15);
  CHECK(sc.segments.size() == 2);
  CHECK_THROWS_AS(TrafficScenario::from_config(KeyValueConfig::parse("seed = 1\n")), ConfigError);
  CHECK_THROWS_AS(TrafficScenario::from_config(KeyValueConfig::parse("segment = ten 0\n")), ConfigError);
  TrafficScenario bad{{{10, 0}}, 0, 11};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("clear-channel step matches the calibration point") {
  LinkModelParams p;
  auto rng = tick_rng(42, 0);
  const auto r = step(p, 4'000'000, false, 0, rng);
  CHECK(r.sample.dl_bitrate_bps == doctest::Approx(3'949'275).epsilon(1e-6));
  CHECK(r.sample.dl_bler_pct == doctest::Approx(0.72).epsilon(0.1));
  CHECK(std::abs(r.snr_db - 19.6) < 4 * p.snr_jitter_db);
  CHECK(r.sample.dl_cqi >= 12);
}

TEST_CASE("jamming an idle tick moves nothing but SNR") {
  LinkModelParams p;
  auto a = tick_rng(3, 9);
  auto b = tick_rng(3, 9);
  const auto jammed = step(p, 0, true, 9, a);
  const auto clear = step(p, 0, false, 9, b);
  CHECK(jammed.sample.dl_bitrate_bps == 0);
  CHECK(jammed.sample.dl_bytes == 0);
  CHECK(jammed.snr_db == doctest::Approx(clear.snr_db - p.snr_jam_delta_db));
}

TEST_CASE("always-on over the on/off scenario lands near the jammed calibration point") {
  const auto sc = scenario_part_a(42);
  const auto recs = run(sc, std::vector<bool>(270, true));
  CHECK(std::abs(mean_active_bitrate(recs) / 2'154'628.0 - 1.0) < 0.05);
}

TEST_CASE("CQI lookup") {
  const auto table = LinkModelParams::default_cqi_table();
  CHECK(cqi_from_snr(19.6, table) == 13);
  CHECK(cqi_from_snr(-10, table) == 0);
  CHECK(cqi_from_snr(60, table) == 15);
  int prev = 0;
  for (double snr = -20; snr <= 40; snr += 0.01) {
    const int c = cqi_from_snr(snr, table);
    CHECK(c >= prev);
    CHECK(c <= 15);
    prev = c;
  }
  const auto mcs = LinkModelParams::default_mcs_table();
  CHECK(mcs_from_snr(-20, mcs) == 0);
  CHECK(mcs_from_snr(60, mcs) == 28);
  CHECK(index_from_snr(1.0, std::vector<double>{0.0, 1.0, 2.0}) == 2);
}

TEST_CASE("link parameters round-trip through config text") {
  LinkModelParams p;
  p.snr_clear_db = 21.25;
  p.bler_jam_pct = 50;
  const auto back = LinkModelParams::from_config(KeyValueConfig::parse(p.to_config()));
  CHECK(back == p);
  p.throughput_retain_jam = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  LinkModelParams q;
  q.cqi_table.pop_back();
  CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("simulator properties on random scenarios and jam patterns") {
  gen::Engine rng(2024);
  for (int iter = 0; iter < 40; ++iter) {
    const auto sc = gen::scenario(rng, gen::integer(rng, 20, 120));
    std::vector<bool> j1(static_cast<std::size_t>(sc.total_s)), j2(j1.size());
    for (std::size_t t = 0; t < j1.size(); ++t) {
      j2[t] = gen::uniform(rng, 0, 1) < 0.5;
      j1[t] = j2[t] && gen::uniform(rng, 0, 1) < 0.5;  // J1 ⊆ J2
    }
    const auto a = run(sc, j1);
    const auto again = run(sc, j1);
    const auto b = run(sc, j2);
    CHECK(a == again);

    std::int64_t bytes = 0;
    for (const auto& r : a) {
      CHECK(within_bounds(r.sample));
      CHECK(r.sample.dl_bitrate_bps <= static_cast<double>(r.offered_rate_bps));
      CHECK(r.sample.dl_bytes == std::llround(r.sample.dl_bitrate_bps / 8.0));
      bytes += r.sample.dl_bytes;
    }
    const auto total = std::accumulate(a.begin(), a.end(), std::int64_t{0},
                                       [](std::int64_t s, const TickRecord& r) { return s + r.sample.dl_bytes; });
    CHECK(bytes == total);

    if (sc.active_ticks() > 0) CHECK(mean_active_bitrate(a) >= mean_active_bitrate(b));
  }
}

TEST_CASE("a tick's jitter does not depend on earlier decisions") {
  const auto sc = scenario_part_a(7);
  std::vector<bool> none(270, false), some(270, false);
  for (int t = 0; t < 100; t += 3) some[t] = true;
  const auto a = run(sc, none);
  const auto b = run(sc, some);
  for (std::size_t t = 100; t < 270; ++t) CHECK(a[t] == b[t]);
}

TEST_CASE("simulator stops at the end of the scenario") {
  Simulator sim(TrafficScenario{{{2, 4'000'000}}, 1, 2}, {});
  sim.advance(false);
  sim.advance(false);
  CHECK(sim.done());
  CHECK_THROWS_AS(sim.advance(false), std::out_of_range);
}
