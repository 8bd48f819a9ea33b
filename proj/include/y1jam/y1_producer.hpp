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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "y1jam/sdl_store.hpp"
#include "y1jam/y1_types.hpp"

namespace y1jam {

class NoData : public std::runtime_error {
 public:
  NoData() : std::runtime_error("no analytics stored for the cell") {}
};

/// Projects a sample onto the subscription's metric filter (all nine when
/// `filter` is empty). Throws NoData when `sample` is absent.
NotificationPayload build_notification(const Subscription& sub,
                                       const std::optional<AnalyticsSample>& sample,
                                       std::span<const std::string> filter,
                                       const std::string& now_iso);

/// Delivers one JSON payload to a consumer; true iff it was acknowledged (2xx).
using NotificationSender =
    std::function<bool(const std::string& target_address, const std::string& body)>;

struct ProducerConfig {
  CellKey cell{1, 0};
  /// Consecutive delivery failures after which a subscription is cancelled.
  std::size_t max_consecutive_failures = 5;
  SessionClock clock;
  /// When false (test mode) requests without a client identity are served.
  bool require_client_identity = true;
};

struct DeliveryStats {
  std::uint64_t delivered = 0;
  std::uint64_t failed = 0;
  std::size_t consecutive_failures = 0;
};

/// Y1 RAI producer: subscription table, periodic dispatcher and the REST
/// routing for subscribe / unsubscribe / update.
///
/// Time is session seconds supplied by the caller through dispatch(), so the
/// same object runs under a virtual clock or a wall-clock timer thread.
/// Request handlers may run concurrently with dispatch(); once unsubscribe()
/// returns, no further payload carrying that id is sent.
class Producer {
 public:
  Producer(const SdlStore& store, ProducerConfig config, NotificationSender sender);

  Subscription subscribe(const SubscriptionRequest& req,
                         const std::optional<std::string>& client_identity);
  void unsubscribe(const std::string& id);
  /// Only notificationCriteria.periodSeconds may change.
  Subscription update(const std::string& id, const nlohmann::json& partial);

  std::optional<Subscription> find(const std::string& id) const;
  std::vector<Subscription> active_subscriptions() const;
  std::optional<DeliveryStats> stats(const std::string& id) const;

  /// Runs one dispatcher round at session time `now_s`: every ACTIVE
  /// subscription whose period has elapsed gets one payload built from the
  /// latest stored sample. Missed periods are dropped, never queued.
  /// Returns the number of payloads acknowledged.
  std::size_t dispatch(double now_s);

  double now() const;

  /// REST entry point shared by the HTTP server and in-process transports.
  HttpReply handle(const ApiRequest& req);

 private:
  struct Entry {
    Subscription sub;
    double created_s = 0.0;
    double next_due_s = 0.0;
    std::optional<double> last_sent_s;
    DeliveryStats stats;
  };

  std::string fresh_id();
  void cancel_locked(std::map<std::string, Entry>::iterator it);

  const SdlStore& store_;
  ProducerConfig config_;
  NotificationSender sender_;

  mutable std::mutex mu_;
  std::mutex dispatch_mu_;
  std::map<std::string, Entry> table_;
  std::map<std::string, DeliveryStats> retired_stats_;
  double now_s_ = 0.0;
  std::random_device entropy_;
};

}  // namespace y1jam
