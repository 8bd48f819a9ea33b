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

#include "y1jam/profiler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "y1jam/config.hpp"

namespace y1jam {

using nlohmann::json;

namespace {

double squared_distance(const Vec4& a, const Vec4& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

FeatureVector features_of(const AnalyticsSample& s) {
  return {s.dl_cqi, s.dl_mcs, s.dl_bitrate_bps, s.dl_bler_pct};
}

Vec4 Standardizer::transform(const Vec4& x) const {
  Vec4 z;
  for (std::size_t i = 0; i < kFeatureDim; ++i) z[i] = (x[i] - mu[i]) / sigma[i];
  return z;
}

Vec4 Standardizer::inverse(const Vec4& z) const {
  Vec4 x;
  for (std::size_t i = 0; i < kFeatureDim; ++i) x[i] = z[i] * sigma[i] + mu[i];
  return x;
}

Standardizer fit_standardizer(std::span<const Vec4> rows) {
  if (rows.size() < 2) {
    throw InsufficientData(fmt::format("need at least 2 samples to standardize, got {}", rows.size()));
  }
  const double n = static_cast<double>(rows.size());
  Standardizer s;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[i];
    mean /= n;
    double var = 0.0;
    for (const auto& r : rows) var += (r[i] - mean) * (r[i] - mean);
    const double sd = std::sqrt(var / n);
    s.mu[i] = mean;
    s.sigma[i] = sd < 1e-12 ? 1.0 : sd;
  }
  return s;
}

std::vector<Vec4> transform(const Standardizer& s, std::span<const Vec4> rows) {
  std::vector<Vec4> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(s.transform(r));
  return out;
}

std::vector<int> dbscan(std::span<const Vec4> points, double eps, std::size_t min_pts) {
  if (!(eps > 0.0)) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be at least 1");

  const std::size_t n = points.size();
  const double eps2 = eps * eps;
  auto region = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n; ++q) {
      if (squared_distance(points[p], points[q]) <= eps2) out.push_back(q);
    }
    return out;
  };

  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int next_cluster = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (labels[p] != kUnvisited) continue;
    auto seeds = region(p);
    if (seeds.size() < min_pts) {
      labels[p] = kNoise;
      continue;
    }
    const int c = next_cluster++;
    labels[p] = c;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::size_t q = seeds[k];
      if (labels[q] == kNoise) labels[q] = c;
      if (labels[q] != kUnvisited) continue;
      labels[q] = c;
      auto more = region(q);
      if (more.size() >= min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
    }
  }
  return labels;
}

int cluster_count(std::span<const int> labels) {
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  return k;
}

std::vector<Vec4> centroids(std::span<const Vec4> points, std::span<const int> labels) {
  if (points.size() != labels.size()) {
    throw std::invalid_argument("centroids: points and labels differ in length");
  }
  const int k = cluster_count(labels);
  if (k == 0) throw NoValidClusters("every sample was labeled noise");
  std::vector<Vec4> sums(static_cast<std::size_t>(k), Vec4{});
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (labels[i] < 0) continue;
    auto& acc = sums[static_cast<std::size_t>(labels[i])];
    for (std::size_t d = 0; d < kFeatureDim; ++d) acc[d] += points[i][d];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (std::size_t j = 0; j < sums.size(); ++j) {
    for (auto& v : sums[j]) v /= static_cast<double>(counts[j]);
  }
  return sums;
}

std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::High: return "HIGH";
    case TrafficClass::Medium: return "MEDIUM";
    case TrafficClass::Low: return "LOW";
    case TrafficClass::Idle: return "IDLE";
  }
  return "?";
}

std::optional<TrafficClass> parse_traffic_class(std::string_view text) {
  std::string up(text);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
  if (up == "HIGH") return TrafficClass::High;
  if (up == "MEDIUM") return TrafficClass::Medium;
  if (up == "LOW") return TrafficClass::Low;
  if (up == "IDLE") return TrafficClass::Idle;
  return std::nullopt;
}

std::map<int, TrafficClass> label_clusters(std::span<const Vec4> raw_points,
                                           std::span<const int> labels) {
  const auto raw_centroids = centroids(raw_points, labels);
  std::vector<int> order(raw_centroids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return raw_centroids[static_cast<std::size_t>(a)][2] > raw_centroids[static_cast<std::size_t>(b)][2];
  });

  constexpr TrafficClass kRanked[] = {TrafficClass::High, TrafficClass::Medium, TrafficClass::Low,
                                      TrafficClass::Idle};
  std::map<int, TrafficClass> out;
  const std::size_t k = order.size();
  if (k >= 4) {
    for (std::size_t r = 0; r < 3; ++r) out[order[r]] = kRanked[r];
    out[order.back()] = TrafficClass::Idle;
    return out;
  }
  for (std::size_t r = 0; r < k; ++r) out[order[r]] = kRanked[r];
  const int lowest = order.back();
  if (raw_centroids[static_cast<std::size_t>(lowest)][2] < kIdleBitrateBps) {
    out[lowest] = TrafficClass::Idle;
  }
  return out;
}

std::optional<int> ClusterModel::index_of(TrafficClass c) const {
  for (const auto& [idx, cls] : labels_semantic) {
    if (cls == c) return idx;
  }
  return std::nullopt;
}

json ClusterModel::to_json() const {
  json labels = json::object();
  for (const auto& [idx, cls] : labels_semantic) labels[std::to_string(idx)] = to_string(cls);
  return json{{"model_version", kVersion},
              {"mu", standardizer.mu},
              {"sigma", standardizer.sigma},
              {"eps", eps},
              {"min_pts", min_pts},
              {"centroids", centroids},
              {"labels_semantic", labels}};
}

ClusterModel ClusterModel::from_json(const json& j) {
  try {
    if (j.at("model_version").get<int>() != kVersion) {
      throw std::invalid_argument(
          fmt::format("unsupported model_version {}", j.at("model_version").dump()));
    }
    ClusterModel m;
    m.standardizer.mu = j.at("mu").get<Vec4>();
    m.standardizer.sigma = j.at("sigma").get<Vec4>();
    m.eps = j.at("eps").get<double>();
    m.min_pts = j.at("min_pts").get<std::size_t>();
    m.centroids = j.at("centroids").get<std::vector<Vec4>>();
    for (const auto& [key, value] : j.at("labels_semantic").items()) {
      auto cls = parse_traffic_class(value.get<std::string>());
      if (!cls) throw std::invalid_argument("unknown semantic label " + value.dump());
      const int idx = std::stoi(key);
      if (idx < 0 || idx >= static_cast<int>(m.centroids.size())) {
        throw std::invalid_argument("semantic label for missing cluster " + key);
      }
      m.labels_semantic[idx] = *cls;
    }
    if (m.centroids.empty()) throw std::invalid_argument("model has no centroids");
    for (double s : m.standardizer.sigma) {
      if (!(s > 0.0)) throw std::invalid_argument("model sigma must be positive");
    }
    return m;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed cluster model: ") + e.what());
  }
}

void ClusterModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model to " + path.string());
  out << to_json().dump(2) << '\n';
}

ClusterModel ClusterModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model from " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("model file " + path.string() + " is not JSON: " + e.what());
  }
  return from_json(j);
}

int classify(const FeatureVector& x, const ClusterModel& model) {
  if (model.centroids.empty()) throw NoValidClusters("model has no centroids");
  const Vec4 z = model.standardizer.transform(x.as_array());
  int best = 0;
  double best_d = squared_distance(z, model.centroids[0]);
  for (std::size_t j = 1; j < model.centroids.size(); ++j) {
    const double d = squared_distance(z, model.centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

ClusterModel fit_model(std::span<const Vec4> raw_rows, double eps, std::size_t min_pts) {
  ClusterModel m;
  m.eps = eps;
  m.min_pts = min_pts;
  m.standardizer = fit_standardizer(raw_rows);
  const auto z = transform(m.standardizer, raw_rows);
  const auto labels = dbscan(z, eps, min_pts);
  m.centroids = centroids(z, labels);
  m.labels_semantic = label_clusters(raw_rows, labels);
  return m;
}

std::vector<EpsSweepRow> eps_sweep(std::span<const Vec4> raw_rows, std::span<const double> eps_values,
                                   std::size_t min_pts) {
  const auto z = transform(fit_standardizer(raw_rows), raw_rows);
  std::vector<EpsSweepRow> out;
  for (double eps : eps_values) {
    const auto labels = dbscan(z, eps, min_pts);
    out.push_back({eps, cluster_count(labels),
                   static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise))});
  }
  return out;
}

std::vector<Vec4> read_training_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "cqi,mcs,bitrate_bps,bler_pct") {
    throw std::invalid_argument("training CSV must start with header cqi,mcs,bitrate_bps,bler_pct");
  }
  std::vector<Vec4> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != kFeatureDim) {
      throw std::invalid_argument(fmt::format("training CSV line {}: expected 4 fields", line_no));
    }
    Vec4 row;
    for (std::size_t i = 0; i < kFeatureDim; ++i) {
      try {
        std::size_t used = 0;
        row[i] = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::invalid_argument(
            fmt::format("training CSV line {}: '{}' is not a number", line_no, cells[i]));
      }
      if (!std::isfinite(row[i])) {
        throw std::invalid_argument(fmt::format("training CSV line {}: non-finite value", line_no));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_training_csv(std::ostream& out, std::span<const Vec4> rows) {
  out << "cqi,mcs,bitrate_bps,bler_pct\n";
  for (const auto& r : rows) out << fmt::format("{},{},{},{}\n", r[0], r[1], r[2], r[3]);
}

}  // namespace y1jam
