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

#include "y1jam/sdl_store.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>

namespace y1jam {

SdlStore::SdlStore(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("SDL capacity must be positive");
}

void SdlStore::put_sample(const CellKey& key, const AnalyticsSample& sample) {
  std::lock_guard lock(mu_);
  auto& series = series_[key];
  if (!series.empty() && sample.tick <= series.back().tick) {
    throw NonMonotonicTick(
        fmt::format("tick {} is not after latest stored tick {}", sample.tick, series.back().tick));
  }
  series.push_back(sample);
  while (series.size() > capacity_) series.pop_front();
}

std::optional<AnalyticsSample> SdlStore::latest(const CellKey& key) const {
  std::lock_guard lock(mu_);
  auto it = series_.find(key);
  if (it == series_.end() || it->second.empty()) return std::nullopt;
  return it->second.back();
}

std::vector<AnalyticsSample> SdlStore::range(const CellKey& key, std::int64_t from_tick,
                                             std::int64_t to_tick) const {
  if (from_tick > to_tick) {
    throw InvalidRange(fmt::format("range [{}, {}] is empty by construction", from_tick, to_tick));
  }
  std::lock_guard lock(mu_);
  std::vector<AnalyticsSample> out;
  auto it = series_.find(key);
  if (it == series_.end()) return out;
  const auto& series = it->second;
  auto lo = std::lower_bound(series.begin(), series.end(), from_tick,
                             [](const AnalyticsSample& s, std::int64_t t) { return s.tick < t; });
  for (; lo != series.end() && lo->tick <= to_tick; ++lo) out.push_back(*lo);
  return out;
}

std::size_t SdlStore::size(const CellKey& key) const {
  std::lock_guard lock(mu_);
  auto it = series_.find(key);
  return it == series_.end() ? 0 : it->second.size();
}

std::string SdlStore::dump_csv(const CellKey& key) const {
  std::lock_guard lock(mu_);
  std::string out = csv_header() + "\n";
  if (auto it = series_.find(key); it != series_.end()) {
    for (const auto& s : it->second) out += to_csv_row(s) + "\n";
  }
  return out;
}

}  // namespace y1jam
