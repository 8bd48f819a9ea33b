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

#include "y1jam/analytics.hpp"

#include <fmt/format.h>

namespace y1jam {

std::optional<std::string_view> canonical_metric_name(std::string_view name) {
  for (auto canonical : kMetricNames) {
    if (name == canonical) return canonical;
  }
  if (name == "dl_bitrate") return "dl_bitrate_bps";
  if (name == "dl_bler") return "dl_bler_pct";
  if (name == "dl_latency") return "dl_latency_s";
  return std::nullopt;
}

nlohmann::json metric_value(const AnalyticsSample& s, std::string_view name) {
  if (name == "dl_cqi") return s.dl_cqi;
  if (name == "dl_mcs") return s.dl_mcs;
  if (name == "dl_bitrate_bps") return s.dl_bitrate_bps;
  if (name == "dl_bler_pct") return s.dl_bler_pct;
  if (name == "dl_latency_s") return s.dl_latency_s;
  if (name == "dl_bytes") return s.dl_bytes;
  if (name == "pci") return s.pci;
  if (name == "carrier_id") return s.carrier_id;
  if (name == "num_rach") return s.num_rach;
  return nullptr;
}

bool within_bounds(const AnalyticsSample& s) {
  return s.dl_cqi >= 0.0 && s.dl_cqi <= 15.0 && s.dl_mcs >= 0.0 && s.dl_mcs <= 28.0 &&
         s.dl_bitrate_bps >= 0.0 && s.dl_bler_pct >= 0.0 && s.dl_bler_pct <= 100.0 &&
         s.dl_latency_s >= 0.0 && s.dl_bytes >= 0 && s.num_rach >= 0;
}

std::string csv_header() {
  return "tick,dl_cqi,dl_mcs,dl_bitrate_bps,dl_bler_pct,dl_latency_s,dl_bytes,pci,carrier_id,"
         "num_rach";
}

std::string to_csv_row(const AnalyticsSample& s) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{}", s.tick, s.dl_cqi, s.dl_mcs,
                     s.dl_bitrate_bps, s.dl_bler_pct, s.dl_latency_s, s.dl_bytes, s.pci,
                     s.carrier_id, s.num_rach);
}

}  // namespace y1jam
