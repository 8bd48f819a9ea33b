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


// Hand-rolled random inputs for property tests. Every generator takes the
// engine explicitly so a failing case can be replayed from its seed.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "y1jam/analytics.hpp"
#include "y1jam/profiler.hpp"
#include "y1jam/ran_sim.hpp"

namespace gen {

using Engine = std::mt19937_64;
using y1jam::Vec4;

inline double uniform(Engine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::int64_t integer(Engine& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

struct Dataset {
  std::vector<Vec4> points;
  double eps = 0.3;
  std::size_t min_pts = 3;
};

/// Gaussian blobs with uniform background noise.
inline Dataset blobs(Engine& rng, std::size_t max_n) {
  Dataset d;
  const auto n = static_cast<std::size_t>(integer(rng, 1, static_cast<std::int64_t>(max_n)));
  const auto k = integer(rng, 1, 4);
  std::vector<Vec4> centers;
  for (int c = 0; c < k; ++c)
    centers.push_back({uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)});
  const double spread = uniform(rng, 0.05, 0.6);
  std::normal_distribution<double> jitter(0.0, spread);
  for (std::size_t i = 0; i < n; ++i) {
    if (uniform(rng, 0, 1) < 0.15) {
      d.points.push_back({uniform(rng, -4, 4), uniform(rng, -4, 4), uniform(rng, -4, 4), uniform(rng, -4, 4)});
      continue;
    }
    const auto& c = centers[static_cast<std::size_t>(integer(rng, 0, k - 1))];
    d.points.push_back({c[0] + jitter(rng), c[1] + jitter(rng), c[2] + jitter(rng), c[3] + jitter(rng)});
  }
  d.eps = uniform(rng, 0.1, 1.5);
  d.min_pts = static_cast<std::size_t>(integer(rng, 1, 8));
  return d;
}

/// Integer lattice points with duplicates, so many pairs sit exactly at eps.
inline Dataset lattice(Engine& rng, std::size_t max_n) {
  Dataset d;
  const auto n = static_cast<std::size_t>(integer(rng, 1, static_cast<std::int64_t>(max_n)));
  for (std::size_t i = 0; i < n; ++i) {
    d.points.push_back({static_cast<double>(integer(rng, 0, 4)), static_cast<double>(integer(rng, 0, 4)),
                        static_cast<double>(integer(rng, 0, 1)), 0.0});
  }
  const double eps_choices[] = {1.0, 2.0, 3.0};
  d.eps = eps_choices[integer(rng, 0, 2)];
  d.min_pts = static_cast<std::size_t>(integer(rng, 2, 6));
  return d;
}

inline Dataset any_dataset(Engine& rng, std::size_t max_n) {
  return integer(rng, 0, 2) == 0 ? lattice(rng, max_n) : blobs(rng, max_n);
}

/// Well separated tight groups: every group member lies within eps of every
/// other, groups are far apart, and each group has at least min_pts members.
/// Isolated singletons supply noise.
inline Dataset separated(Engine& rng) {
  Dataset d;
  d.eps = 0.5;
  d.min_pts = static_cast<std::size_t>(integer(rng, 2, 5));
  const auto groups = integer(rng, 1, 5);
  for (int g = 0; g < groups; ++g) {
    const Vec4 c{10.0 * g, 0.0, 0.0, 0.0};
    const auto size = integer(rng, static_cast<std::int64_t>(d.min_pts), 10);
    for (int i = 0; i < size; ++i)
      d.points.push_back({c[0] + uniform(rng, -0.1, 0.1), c[1] + uniform(rng, -0.1, 0.1),
                          c[2] + uniform(rng, -0.1, 0.1), c[3]});
  }
  const auto singles = integer(rng, 0, 4);
  for (int i = 0; i < singles; ++i) d.points.push_back({-10.0 - 10.0 * i, 5.0, 0.0, 0.0});
  return d;
}

inline std::vector<Vec4> raw_rows(Engine& rng, std::size_t n) {
  std::vector<Vec4> rows;
  for (std::size_t i = 0; i < n; ++i)
    rows.push_back({uniform(rng, 0, 15), uniform(rng, 0, 28), uniform(rng, 0, 4e6), uniform(rng, 0, 100)});
  return rows;
}

/// Segments over rates {0, 500k, 2M, 4M} adding up to `total_s`.
inline y1jam::TrafficScenario scenario(Engine& rng, std::int64_t total_s) {
  const std::int64_t rates[] = {0, 500'000, 2'000'000, 4'000'000};
  y1jam::TrafficScenario s;
  s.seed = rng();
  s.total_s = total_s;
  std::int64_t left = total_s;
  while (left > 0) {
    const auto len = std::min(left, integer(rng, 1, 15));
    s.segments.push_back({len, rates[integer(rng, 0, 3)]});
    left -= len;
  }
  return s;
}

inline y1jam::AnalyticsSample sample(Engine& rng, std::int64_t tick) {
  y1jam::AnalyticsSample s;
  s.tick = tick;
  s.dl_cqi = static_cast<double>(integer(rng, 0, 15));
  s.dl_mcs = static_cast<double>(integer(rng, 0, 28));
  s.dl_bitrate_bps = uniform(rng, 0, 4e6);
  s.dl_bler_pct = uniform(rng, 0, 100);
  s.dl_latency_s = uniform(rng, 0, 0.1);
  s.dl_bytes = static_cast<std::int64_t>(s.dl_bitrate_bps / 8);
  s.pci = 1;
  s.carrier_id = 0;
  s.num_rach = integer(rng, 0, 3);
  return s;
}

}  // namespace gen
