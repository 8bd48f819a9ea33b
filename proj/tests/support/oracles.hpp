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


// Straightforward reference implementations used to cross-check the library.
// None of these share code with src/.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "y1jam/profiler.hpp"

namespace oracle {

using y1jam::Vec4;

inline double distance(const Vec4& a, const Vec4& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// O(n²) DBSCAN: full neighborhood table, union-find over core-core edges,
/// components ordered by their smallest core index. A border point goes to
/// the earliest component among its core neighbors.
inline std::vector<int> dbscan(std::span<const Vec4> pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<bool>> near(n, std::vector<bool>(n, false));
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      near[i][j] = distance(pts[i], pts[j]) <= eps;
      count += near[i][j] ? 1 : 0;
    }
    core[i] = count >= min_pts;
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (core[i] && core[j] && near[i][j]) parent[find(j)] = find(i);

  std::map<std::size_t, int> order;  // root -> cluster number
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i] && !order.count(find(i))) {
      const int next = static_cast<int>(order.size());
      order[find(i)] = next;
    }
  }

  std::vector<int> labels(n, y1jam::kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      labels[i] = order[find(i)];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && near[i][j]) {
        const int c = order[find(j)];
        if (labels[i] == y1jam::kNoise || c < labels[i]) labels[i] = c;
      }
    }
  }
  return labels;
}

/// Same noise set and a bijection between cluster labels.
inline bool same_partition(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> fwd, back;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == y1jam::kNoise) != (b[i] == y1jam::kNoise)) return false;
    if (a[i] == y1jam::kNoise) continue;
    auto [f, fnew] = fwd.emplace(a[i], b[i]);
    auto [r, rnew] = back.emplace(b[i], a[i]);
    if (f->second != b[i] || r->second != a[i]) return false;
  }
  return true;
}

struct Moments {
  Vec4 mean{};
  Vec4 stddev{};
};

/// Column means and population standard deviations.
inline Moments moments(std::span<const Vec4> rows) {
  Moments m;
  for (std::size_t k = 0; k < 4; ++k) {
    double s = 0.0;
    for (const auto& r : rows) s += r[k];
    m.mean[k] = s / static_cast<double>(rows.size());
    double v = 0.0;
    for (const auto& r : rows) v += (r[k] - m.mean[k]) * (r[k] - m.mean[k]);
    m.stddev[k] = std::sqrt(v / static_cast<double>(rows.size()));
  }
  return m;
}

inline int nearest(const Vec4& z, std::span<const Vec4> centroids) {
  int best = -1;
  double best_d = 0.0;
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    const double d = distance(z, centroids[j]);
    if (best < 0 || d < best_d) {
      best = static_cast<int>(j);
      best_d = d;
    }
  }
  return best;
}

/// Ticks left in a ring of `capacity` after appending `ticks` in order.
inline std::vector<std::int64_t> ring_replay(std::span<const std::int64_t> ticks,
                                             std::size_t capacity) {
  std::deque<std::int64_t> ring;
  for (auto t : ticks) {
    ring.push_back(t);
    if (ring.size() > capacity) ring.pop_front();
  }
  return {ring.begin(), ring.end()};
}

/// ceil(percent × total / 100) in integer arithmetic.
inline std::int64_t budget_cap(std::int64_t percent, std::int64_t total) {
  return (percent * total + 99) / 100;
}

/// Class tick counts for the multi-rate scenario: shares rounded to whole
/// ticks, with any residue given to the first class.
inline std::vector<std::int64_t> part_b_counts(std::int64_t total) {
  const double shares[] = {0.355, 0.245, 0.245, 0.155};
  std::vector<std::int64_t> out;
  std::int64_t sum = 0;
  for (double s : shares) {
    out.push_back(std::llround(s * static_cast<double>(total)));
    sum += out.back();
  }
  out[0] += total - sum;
  return out;
}

/// (value, fraction ≤ value) at each distinct value, by counting.
inline std::vector<std::pair<double, double>> cdf(std::span<const double> values) {
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  std::vector<std::pair<double, double>> out;
  std::size_t running = 0;
  for (auto [v, c] : counts) {
    running += c;
    out.emplace_back(v, static_cast<double>(running) / static_cast<double>(values.size()));
  }
  return out;
}

}  // namespace oracle
