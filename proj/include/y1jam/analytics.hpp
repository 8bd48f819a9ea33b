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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace y1jam {

/// One tick of aggregated downlink analytics for a single cell.
///
/// This is the unit exchanged over Y1: the simulator produces it, the SDL
/// stores it, the producer projects it into notification payloads, and the
/// jammer consumes the relayed projection.
struct AnalyticsSample {
  std::int64_t tick = 0;
  double dl_cqi = 0.0;          // [0, 15]
  double dl_mcs = 0.0;          // [0, 28]
  double dl_bitrate_bps = 0.0;  // >= 0
  double dl_bler_pct = 0.0;     // [0, 100]
  double dl_latency_s = 0.0;    // >= 0
  std::int64_t dl_bytes = 0;
  std::int64_t pci = 0;
  std::int64_t carrier_id = 0;
  std::int64_t num_rach = 0;

  friend bool operator==(const AnalyticsSample&, const AnalyticsSample&) = default;
};

/// The nine exported metric names, in canonical order.
inline constexpr std::array<std::string_view, 9> kMetricNames = {
    "dl_cqi", "dl_mcs",     "dl_bitrate_bps", "dl_bler_pct", "dl_latency_s",
    "dl_bytes", "pci", "carrier_id", "num_rach"};

/// Maps a metric name (canonical or short alias such as "dl_bitrate") onto
/// its canonical name. Returns nullopt for unknown names.
std::optional<std::string_view> canonical_metric_name(std::string_view name);

/// Value of a canonical metric as JSON (integers stay integral).
nlohmann::json metric_value(const AnalyticsSample& sample, std::string_view canonical_name);

/// Checks the documented per-field ranges.
bool within_bounds(const AnalyticsSample& sample);

std::string csv_header();
std::string to_csv_row(const AnalyticsSample& sample);

}  // namespace y1jam
