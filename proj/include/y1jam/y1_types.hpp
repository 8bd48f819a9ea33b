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

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "y1jam/analytics.hpp"

namespace y1jam {

inline constexpr const char* kRaiTypePerformance = "ran_performance_analytics";
inline constexpr const char* kSubscriptionsBase = "/Y1_RAI_Subscriptions/v1/subscriptions";

/// Error surfaced to an HTTP client: status code plus a short message.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Transport-neutral request as seen by the API routers.
struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  /// Authenticated client identity (certificate subject), or "test-mode".
  std::optional<std::string> client_identity;
};

/// Splits `target` ("/path?k=v&...") into path and query for in-process
/// transports. Query values are taken verbatim.
ApiRequest make_api_request(std::string method, const std::string& target, std::string body,
                            std::optional<std::string> client_identity);

struct Url {
  std::string scheme;  // http | https
  std::string host;
  int port = 0;
  std::string path;  // always starts with '/'

  std::string origin() const;
  std::string to_string() const;
};

/// Parses `scheme://host[:port][/path]`; nullopt when malformed.
std::optional<Url> parse_url(const std::string& text);

enum class Trigger { Periodic, Event };

struct NotificationCriteria {
  Trigger trigger = Trigger::Periodic;
  double period_s = 1.0;
};

struct SubscriptionRequest {
  std::string rai_type;
  std::string rai_type_version;
  NotificationCriteria criteria;
  std::string notification_target_address;
  /// Canonical metric names to include; empty means all nine.
  std::vector<std::string> metrics_filter;
};

/// Parses and validates a request body. Throws ApiError(400) for missing or
/// invalid fields and for an unsupported RAI type or trigger.
SubscriptionRequest parse_subscription_request(const nlohmann::json& body);
nlohmann::json to_json(const SubscriptionRequest& req);

enum class SubscriptionState { Active, Cancelled };

struct Subscription {
  std::string id;
  SubscriptionRequest request;
  SubscriptionState state = SubscriptionState::Active;
  std::int64_t created_tick = 0;
  std::optional<std::int64_t> last_notified_tick;
};

nlohmann::json to_json(const Subscription& sub);

struct NotificationPayload {
  std::string subscription_id;
  nlohmann::json rai_content = nlohmann::json::object();
  std::string timestamp;
  std::int64_t validity_period = 0;
};

nlohmann::json to_json(const NotificationPayload& p);
/// Throws std::invalid_argument on missing fields or wrong types.
NotificationPayload parse_notification(const nlohmann::json& j);

/// Session time base: tick t is rendered as epoch + t seconds in ISO-8601 UTC.
class SessionClock {
 public:
  static constexpr std::int64_t kDefaultEpoch = 1735689600;  // 2025-01-01T00:00:00Z

  SessionClock() = default;
  explicit SessionClock(std::int64_t epoch_unix_s) : epoch_(epoch_unix_s) {}

  std::string iso8601(double session_seconds) const;
  /// Inverse of iso8601; throws std::invalid_argument when unparsable.
  double session_seconds(const std::string& iso) const;
  std::int64_t epoch() const { return epoch_; }

 private:
  std::int64_t epoch_ = kDefaultEpoch;
};

}  // namespace y1jam
