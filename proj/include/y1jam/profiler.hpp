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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "y1jam/analytics.hpp"

namespace y1jam {

inline constexpr std::size_t kFeatureDim = 4;
using Vec4 = std::array<double, kFeatureDim>;

/// Feature order is fixed: CQI, MCS, bitrate, BLER.
struct FeatureVector {
  double cqi = 0.0;
  double mcs = 0.0;
  double bitrate_bps = 0.0;
  double bler_pct = 0.0;

  Vec4 as_array() const { return {cqi, mcs, bitrate_bps, bler_pct}; }
  static FeatureVector from_array(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector features_of(const AnalyticsSample& sample);

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoValidClusters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Standardizer {
  Vec4 mu{};
  Vec4 sigma{1.0, 1.0, 1.0, 1.0};

  Vec4 transform(const Vec4& x) const;
  Vec4 inverse(const Vec4& z) const;
};

/// Per-feature mean and population standard deviation. A component with
/// sigma < 1e-12 gets sigma 1.0. Throws InsufficientData for fewer than two rows.
Standardizer fit_standardizer(std::span<const Vec4> rows);
std::vector<Vec4> transform(const Standardizer& s, std::span<const Vec4> rows);

inline constexpr int kNoise = -1;

/// DBSCAN over Euclidean distance with closed neighborhoods (a point counts
/// toward its own min_pts). Clusters are numbered in order of their first
/// core point in input order; a border point joins the first cluster that
/// reaches it. Noise is kNoise.
std::vector<int> dbscan(std::span<const Vec4> points, double eps, std::size_t min_pts);

int cluster_count(std::span<const int> labels);

/// Mean of each cluster's members, noise excluded. Throws NoValidClusters
/// when every label is noise.
std::vector<Vec4> centroids(std::span<const Vec4> points, std::span<const int> labels);

enum class TrafficClass { High, Medium, Low, Idle };

std::string_view to_string(TrafficClass c);
/// Accepts HIGH / MEDIUM / LOW / IDLE in any case.
std::optional<TrafficClass> parse_traffic_class(std::string_view text);

/// Clusters at or below this mean bitrate count as idle.
inline constexpr double kIdleBitrateBps = 1000.0;

/// Ranks clusters by raw-space mean bitrate, descending, and names them
/// HIGH, MEDIUM, LOW, IDLE. With fewer than four clusters names run from
/// HIGH downward except that a lowest cluster under 1 kbps is always IDLE.
/// With more than four, the lowest is IDLE and the ones between LOW and IDLE
/// stay unnamed.
std::map<int, TrafficClass> label_clusters(std::span<const Vec4> raw_points,
                                           std::span<const int> labels);

struct ClusterModel {
  static constexpr int kVersion = 1;

  Standardizer standardizer;
  std::vector<Vec4> centroids;  // standardized space
  std::map<int, TrafficClass> labels_semantic;
  double eps = 0.30;
  std::size_t min_pts = 10;

  std::optional<int> index_of(TrafficClass c) const;

  nlohmann::json to_json() const;
  /// Throws std::invalid_argument on schema or version mismatch.
  static ClusterModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ClusterModel load(const std::filesystem::path& path);
};

/// Index of the nearest centroid to the standardized `x`; ties go to the
/// lowest index.
int classify(const FeatureVector& x, const ClusterModel& model);

/// Standardize, cluster, take centroids and name them.
ClusterModel fit_model(std::span<const Vec4> raw_rows, double eps, std::size_t min_pts);

struct EpsSweepRow {
  double eps = 0.0;
  int clusters = 0;
  std::size_t noise = 0;
};

/// DBSCAN on the standardized rows for each eps.
std::vector<EpsSweepRow> eps_sweep(std::span<const Vec4> raw_rows, std::span<const double> eps_values,
                                   std::size_t min_pts);

/// Training set CSV with header `cqi,mcs,bitrate_bps,bler_pct`.
std::vector<Vec4> read_training_csv(std::istream& in);
void write_training_csv(std::ostream& out, std::span<const Vec4> rows);

}  // namespace y1jam
