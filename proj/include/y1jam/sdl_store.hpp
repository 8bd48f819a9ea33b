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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "y1jam/analytics.hpp"

namespace y1jam {

struct CellKey {
  std::int64_t pci = 0;
  std::int64_t carrier_id = 0;

  auto operator<=>(const CellKey&) const = default;
};

inline CellKey cell_of(const AnalyticsSample& s) { return {s.pci, s.carrier_id}; }

class NonMonotonicTick : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// In-memory shared data layer: one append-only ring buffer of samples per
/// cell. One writer and any number of readers may use it concurrently.
class SdlStore {
 public:
  static constexpr std::size_t kDefaultCapacity = 1024;

  explicit SdlStore(std::size_t capacity = kDefaultCapacity);

  /// Appends a sample; ticks must strictly increase per key. Evicts the
  /// oldest sample once the series is full.
  void put_sample(const CellKey& key, const AnalyticsSample& sample);

  std::optional<AnalyticsSample> latest(const CellKey& key) const;

  /// Stored samples with from_tick <= tick <= to_tick, ascending.
  std::vector<AnalyticsSample> range(const CellKey& key, std::int64_t from_tick,
                                     std::int64_t to_tick) const;

  std::size_t size(const CellKey& key) const;
  std::size_t capacity() const { return capacity_; }

  /// Debug dump of one series in the analytics CSV layout.
  std::string dump_csv(const CellKey& key) const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::map<CellKey, std::deque<AnalyticsSample>> series_;
};

}  // namespace y1jam
