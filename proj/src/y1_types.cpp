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

#include "y1jam/y1_types.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <regex>

#include <fmt/format.h>

#include "y1jam/config.hpp"

namespace y1jam {

using nlohmann::json;

std::string Url::origin() const { return fmt::format("{}://{}:{}", scheme, host, port); }

std::string Url::to_string() const { return origin() + path; }

std::optional<Url> parse_url(const std::string& text) {
  static const std::regex re(R"(^(https?)://([A-Za-z0-9.\-]+)(?::([0-9]{1,5}))?(/[^\s]*)?$)",
                             std::regex::ECMAScript);
  std::smatch m;
  if (!std::regex_match(text, m, re)) return std::nullopt;
  Url url;
  url.scheme = m[1];
  url.host = m[2];
  if (m[3].matched) {
    url.port = std::stoi(m[3]);
    if (url.port <= 0 || url.port > 65535) return std::nullopt;
  } else {
    url.port = url.scheme == "https" ? 443 : 80;
  }
  url.path = m[4].matched ? std::string(m[4]) : "/";
  return url;
}

namespace {

const char* trigger_name(Trigger t) { return t == Trigger::Periodic ? "PERIODIC" : "EVENT"; }

void bad_request(const std::string& msg) { throw ApiError(400, msg); }

}  // namespace

SubscriptionRequest parse_subscription_request(const json& body) {
  if (!body.is_object()) bad_request("request body must be a JSON object");
  SubscriptionRequest req;

  auto rai_type = body.find("raiType");
  if (rai_type == body.end() || !rai_type->is_string() || rai_type->get<std::string>().empty()) {
    bad_request("raiType is required");
  }
  req.rai_type = rai_type->get<std::string>();
  if (req.rai_type != kRaiTypePerformance) bad_request("unsupported raiType '" + req.rai_type + "'");

  auto version = body.find("raiTypeVersion");
  if (version == body.end() || !version->is_string()) bad_request("raiTypeVersion is required");
  req.rai_type_version = version->get<std::string>();

  auto crit = body.find("notificationCriteria");
  if (crit == body.end() || !crit->is_object()) bad_request("notificationCriteria is required");
  auto trig = crit->find("trigger");
  if (trig == crit->end() || !trig->is_string()) bad_request("notificationCriteria.trigger is required");
  const auto trig_name = trig->get<std::string>();
  if (trig_name == "EVENT") bad_request("EVENT trigger is not supported");
  if (trig_name != "PERIODIC") bad_request("unknown trigger '" + trig_name + "'");
  req.criteria.trigger = Trigger::Periodic;
  auto period = crit->find("periodSeconds");
  if (period == crit->end() || !period->is_number()) {
    bad_request("notificationCriteria.periodSeconds is required for PERIODIC");
  }
  req.criteria.period_s = period->get<double>();
  if (!(req.criteria.period_s > 0.0) || !std::isfinite(req.criteria.period_s)) {
    bad_request("periodSeconds must be positive");
  }

  auto target = body.find("notificationTargetAddress");
  if (target == body.end() || !target->is_string() || !parse_url(target->get<std::string>())) {
    bad_request("notificationTargetAddress must be an http(s) URL");
  }
  req.notification_target_address = target->get<std::string>();

  if (auto filter = body.find("metricsFilter"); filter != body.end()) {
    if (!filter->is_array()) bad_request("metricsFilter must be an array of metric names");
    for (const auto& item : *filter) {
      if (!item.is_string()) bad_request("metricsFilter must be an array of metric names");
      auto canonical = canonical_metric_name(item.get<std::string>());
      if (!canonical) bad_request("unknown metric '" + item.get<std::string>() + "'");
      req.metrics_filter.emplace_back(*canonical);
    }
  }
  return req;
}

json to_json(const SubscriptionRequest& req) {
  json j = {{"raiType", req.rai_type},
            {"raiTypeVersion", req.rai_type_version},
            {"notificationCriteria",
             {{"trigger", trigger_name(req.criteria.trigger)},
              {"periodSeconds", req.criteria.period_s}}},
            {"notificationTargetAddress", req.notification_target_address}};
  if (!req.metrics_filter.empty()) j["metricsFilter"] = req.metrics_filter;
  return j;
}

json to_json(const Subscription& sub) {
  json j = to_json(sub.request);
  j["id"] = sub.id;
  j["state"] = sub.state == SubscriptionState::Active ? "ACTIVE" : "CANCELLED";
  j["createdTick"] = sub.created_tick;
  j["lastNotifiedTick"] = sub.last_notified_tick ? json(*sub.last_notified_tick) : json(nullptr);
  return j;
}

json to_json(const NotificationPayload& p) {
  return {{"subscription_id", p.subscription_id},
          {"rai_content", p.rai_content},
          {"timestamp", p.timestamp},
          {"validity_period", p.validity_period}};
}

NotificationPayload parse_notification(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("payload is not an object");
  NotificationPayload p;
  const auto need = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field ") + key);
    return *it;
  };
  const auto& id = need("subscription_id");
  const auto& content = need("rai_content");
  const auto& ts = need("timestamp");
  const auto& validity = need("validity_period");
  if (!id.is_string() || !content.is_object() || !ts.is_string() || !validity.is_number_integer()) {
    throw std::invalid_argument("payload field has the wrong type");
  }
  p.subscription_id = id.get<std::string>();
  p.rai_content = content;
  p.timestamp = ts.get<std::string>();
  p.validity_period = validity.get<std::int64_t>();
  return p;
}

std::string SessionClock::iso8601(double session_seconds) const {
  const double whole = std::floor(session_seconds);
  const auto millis = static_cast<int>(std::lround((session_seconds - whole) * 1000.0));
  std::time_t t = static_cast<std::time_t>(epoch_ + static_cast<std::int64_t>(whole));
  if (millis == 1000) ++t;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  if (millis == 0 || millis == 1000) return fmt::format("{}Z", buf);
  return fmt::format("{}.{:03d}Z", buf, millis);
}

double SessionClock::session_seconds(const std::string& iso) const {
  std::tm tm{};
  int consumed = 0;
  if (std::sscanf(iso.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6) {
    throw std::invalid_argument("bad ISO-8601 timestamp '" + iso + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  double frac = 0.0;
  std::size_t pos = static_cast<std::size_t>(consumed);
  if (pos < iso.size() && iso[pos] == '.') {
    std::size_t end = pos + 1;
    while (end < iso.size() && std::isdigit(static_cast<unsigned char>(iso[end]))) ++end;
    frac = std::stod("0" + iso.substr(pos, end - pos));
    pos = end;
  }
  if (pos + 1 != iso.size() || iso[pos] != 'Z') {
    throw std::invalid_argument("timestamp must be UTC ('Z'): '" + iso + "'");
  }
  return static_cast<double>(timegm(&tm) - epoch_) + frac;
}

ApiRequest make_api_request(std::string method, const std::string& target, std::string body,
                            std::optional<std::string> client_identity) {
  ApiRequest req;
  req.method = std::move(method);
  req.body = std::move(body);
  req.client_identity = std::move(client_identity);
  const auto q = target.find('?');
  req.path = target.substr(0, q);
  if (q != std::string::npos) {
    for (const auto& pair : split(target.substr(q + 1), '&')) {
      if (pair.empty()) continue;
      const auto eq = pair.find('=');
      req.query[pair.substr(0, eq)] = eq == std::string::npos ? "" : pair.substr(eq + 1);
    }
  }
  return req;
}

}  // namespace y1jam
