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

#include "y1jam/y1_producer.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace y1jam {

using nlohmann::json;

namespace {

// Slack for comparing accumulated floating-point due times against the clock.
constexpr double kDueSlack = 1e-9;

}  // namespace

NotificationPayload build_notification(const Subscription& sub,
                                       const std::optional<AnalyticsSample>& sample,
                                       std::span<const std::string> filter,
                                       const std::string& now_iso) {
  if (!sample) throw NoData();
  NotificationPayload p;
  p.subscription_id = sub.id;
  p.timestamp = now_iso;
  p.validity_period = static_cast<std::int64_t>(std::ceil(sub.request.criteria.period_s));
  if (filter.empty()) {
    for (auto name : kMetricNames) p.rai_content[std::string(name)] = metric_value(*sample, name);
  } else {
    for (const auto& name : filter) {
      auto canonical = canonical_metric_name(name);
      if (canonical) p.rai_content[std::string(*canonical)] = metric_value(*sample, *canonical);
    }
  }
  return p;
}

Producer::Producer(const SdlStore& store, ProducerConfig config, NotificationSender sender)
    : store_(store), config_(std::move(config)), sender_(std::move(sender)) {}

std::string Producer::fresh_id() {
  // 128 random bits rendered as 32 hex digits.
  std::string id;
  for (int i = 0; i < 4; ++i) id += fmt::format("{:08x}", entropy_());
  return id;
}

Subscription Producer::subscribe(const SubscriptionRequest& req,
                                 const std::optional<std::string>& client_identity) {
  if (config_.require_client_identity && !client_identity) {
    throw ApiError(401, "client certificate required");
  }
  std::lock_guard lock(mu_);
  std::string id;
  do {
    id = fresh_id();
  } while (table_.count(id) || retired_stats_.count(id));

  Entry e;
  e.sub.id = id;
  e.sub.request = req;
  e.sub.created_tick = static_cast<std::int64_t>(std::floor(now_s_));
  e.created_s = now_s_;
  e.next_due_s = now_s_;
  table_.emplace(id, e);
  spdlog::info("y1 producer: subscription {} created for {} (period {} s, client {})", id,
               req.notification_target_address, req.criteria.period_s,
               client_identity.value_or("<none>"));
  return e.sub;
}

void Producer::cancel_locked(std::map<std::string, Entry>::iterator it) {
  it->second.sub.state = SubscriptionState::Cancelled;
  retired_stats_[it->first] = it->second.stats;
  table_.erase(it);
}

void Producer::unsubscribe(const std::string& id) {
  {
    std::lock_guard lock(mu_);
    auto it = table_.find(id);
    if (it == table_.end()) throw ApiError(404, "unknown subscription '" + id + "'");
    cancel_locked(it);
  }
  // Wait out any in-flight round so nothing is sent for `id` after return.
  std::lock_guard round(dispatch_mu_);
  spdlog::info("y1 producer: subscription {} cancelled", id);
}

Subscription Producer::update(const std::string& id, const json& partial) {
  if (!partial.is_object()) throw ApiError(400, "update body must be a JSON object");
  for (const auto& [key, value] : partial.items()) {
    if (key != "notificationCriteria") {
      throw ApiError(400, "field '" + key + "' cannot be updated; only periodSeconds is mutable");
    }
  }
  auto crit = partial.find("notificationCriteria");
  if (crit == partial.end() || !crit->is_object()) {
    throw ApiError(400, "update must carry notificationCriteria.periodSeconds");
  }
  for (const auto& [key, value] : crit->items()) {
    if (key != "periodSeconds") {
      throw ApiError(400, "notificationCriteria." + key + " cannot be updated");
    }
  }
  auto period = crit->find("periodSeconds");
  if (period == crit->end() || !period->is_number() || !(period->get<double>() > 0.0)) {
    throw ApiError(400, "periodSeconds must be a positive number");
  }
  const double new_period = period->get<double>();

  std::lock_guard lock(mu_);
  auto it = table_.find(id);
  if (it == table_.end()) throw ApiError(404, "unknown subscription '" + id + "'");
  auto& e = it->second;
  e.sub.request.criteria.period_s = new_period;
  e.next_due_s = e.last_sent_s.value_or(e.created_s) + new_period;
  return e.sub;
}

std::optional<Subscription> Producer::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = table_.find(id);
  if (it == table_.end()) return std::nullopt;
  return it->second.sub;
}

std::vector<Subscription> Producer::active_subscriptions() const {
  std::lock_guard lock(mu_);
  std::vector<Subscription> out;
  for (const auto& [id, e] : table_) out.push_back(e.sub);
  return out;
}

std::optional<DeliveryStats> Producer::stats(const std::string& id) const {
  std::lock_guard lock(mu_);
  if (auto it = table_.find(id); it != table_.end()) return it->second.stats;
  if (auto it = retired_stats_.find(id); it != retired_stats_.end()) return it->second;
  return std::nullopt;
}

double Producer::now() const {
  std::lock_guard lock(mu_);
  return now_s_;
}

std::size_t Producer::dispatch(double now_s) {
  std::lock_guard round(dispatch_mu_);

  std::vector<std::string> due;
  {
    std::lock_guard lock(mu_);
    now_s_ = now_s;
    for (const auto& [id, e] : table_) {
      if (e.next_due_s <= now_s + kDueSlack) due.push_back(id);
    }
  }

  const auto timestamp = config_.clock.iso8601(now_s);
  std::size_t acked = 0;
  for (const auto& id : due) {
    std::string body;
    std::string target;
    {
      std::lock_guard lock(mu_);
      auto it = table_.find(id);
      if (it == table_.end()) continue;  // cancelled since the snapshot
      auto& e = it->second;
      const double period = e.sub.request.criteria.period_s;
      while (e.next_due_s <= now_s + kDueSlack) e.next_due_s += period;
      try {
        auto payload = build_notification(e.sub, store_.latest(config_.cell),
                                          e.sub.request.metrics_filter, timestamp);
        body = to_json(payload).dump();
      } catch (const NoData&) {
        spdlog::debug("y1 producer: no data for subscription {} at {}", id, timestamp);
        continue;
      }
      target = e.sub.request.notification_target_address;
    }

    const bool ok = sender_(target, body);

    std::lock_guard lock(mu_);
    auto it = table_.find(id);
    if (it == table_.end()) continue;
    auto& e = it->second;
    if (ok) {
      ++acked;
      ++e.stats.delivered;
      e.stats.consecutive_failures = 0;
      e.last_sent_s = now_s;
      e.sub.last_notified_tick = static_cast<std::int64_t>(std::floor(now_s));
    } else {
      ++e.stats.failed;
      ++e.stats.consecutive_failures;
      spdlog::warn("y1 producer: delivery to {} failed for subscription {} ({} in a row)", target,
                   id, e.stats.consecutive_failures);
      if (e.stats.consecutive_failures >= config_.max_consecutive_failures) {
        spdlog::warn("y1 producer: subscription {} auto-cancelled after {} failures", id,
                     e.stats.consecutive_failures);
        cancel_locked(it);
      }
    }
  }
  return acked;
}

HttpReply Producer::handle(const ApiRequest& req) {
  const std::string base = kSubscriptionsBase;
  const auto error_reply = [](int status, const std::string& msg) {
    return HttpReply{status, json{{"error", msg}}.dump()};
  };
  try {
    if (config_.require_client_identity && !req.client_identity) {
      return error_reply(401, "client certificate required");
    }
    if (req.path == base + "/subscribe") {
      if (req.method != "POST") return error_reply(405, "method not allowed");
      const auto body = json::parse(req.body);
      auto sub = subscribe(parse_subscription_request(body), req.client_identity);
      return HttpReply{201, to_json(sub).dump()};
    }
    if (req.path == base + "/unsubscribe") {
      if (req.method != "DELETE") return error_reply(405, "method not allowed");
      auto id = req.query.find("id");
      if (id == req.query.end() || id->second.empty()) return error_reply(400, "missing id");
      unsubscribe(id->second);
      return HttpReply{204, "", ""};
    }
    if (req.path.rfind(base + "/", 0) == 0) {
      const auto id = req.path.substr(base.size() + 1);
      if (id.empty() || id.find('/') != std::string::npos) return error_reply(404, "not found");
      if (req.method != "PUT") return error_reply(405, "method not allowed");
      const auto body = json::parse(req.body);
      return HttpReply{200, to_json(update(id, body)).dump()};
    }
    return error_reply(404, "not found");
  } catch (const json::exception& e) {
    return error_reply(400, std::string("malformed JSON: ") + e.what());
  } catch (const ApiError& e) {
    return error_reply(e.status(), e.what());
  }
}

}  // namespace y1jam
