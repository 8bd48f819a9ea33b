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

#include "y1jam/y1_consumer.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace y1jam {

using nlohmann::json;

bool TcpRelayLink::connect() {
  auto s = TcpStream::connect(host_, port_, std::chrono::milliseconds(500));
  if (!s) return false;
  stream_ = std::move(*s);
  return true;
}

bool TcpRelayLink::write_line(std::string_view line) { return stream_.write_line(line); }

bool CallbackRelayLink::connect() {
  connected_ = up.load();
  return connected_;
}

bool CallbackRelayLink::write_line(std::string_view line) {
  if (!connected_ || !up.load()) {
    connected_ = false;
    return false;
  }
  sink_(line);
  return true;
}

Relay::Relay(std::unique_ptr<RelayLink> link, std::size_t capacity)
    : link_(std::move(link)), capacity_(std::max<std::size_t>(capacity, 1)) {}

Relay::~Relay() { stop(); }

void Relay::enqueue(std::string line) {
  {
    std::lock_guard lock(queue_mu_);
    queue_.push_back({next_seq_++, std::move(line)});
    while (queue_.size() > capacity_) {
      queue_.pop_front();
      ++dropped_;
    }
  }
  queue_cv_.notify_one();
}

void Relay::collapse_to_newest_locked() {
  while (queue_.size() > 1) {
    queue_.pop_front();
    ++dropped_;
  }
}

std::size_t Relay::pump() {
  std::lock_guard pump_lock(pump_mu_);
  if (!link_->connected()) {
    if (!link_->connect()) {
      std::lock_guard lock(queue_mu_);
      if (!down_) spdlog::warn("relay: jammer link down, keeping newest payload only");
      down_ = true;
      collapse_to_newest_locked();
      return 0;
    }
    if (down_) {
      std::lock_guard lock(queue_mu_);
      collapse_to_newest_locked();
      spdlog::info("relay: jammer link restored");
    }
    down_ = false;
  }

  std::size_t written = 0;
  while (true) {
    Item item;
    {
      std::lock_guard lock(queue_mu_);
      if (queue_.empty()) break;
      item = queue_.front();
    }
    if (!link_->write_line(item.line)) {
      link_->close();
      std::lock_guard lock(queue_mu_);
      spdlog::warn("relay: write to jammer failed, keeping newest payload only");
      down_ = true;
      collapse_to_newest_locked();
      break;
    }
    {
      std::lock_guard lock(queue_mu_);
      if (!queue_.empty() && queue_.front().seq == item.seq) queue_.pop_front();
    }
    ++written;
    ++forwarded_;
  }
  return written;
}

void Relay::start(std::chrono::milliseconds min_backoff, std::chrono::milliseconds max_backoff) {
  stopping_ = false;
  worker_ = std::thread([this, min_backoff, max_backoff] {
    auto backoff = min_backoff;
    while (true) {
      {
        std::unique_lock lock(queue_mu_);
        if (down_) {
          queue_cv_.wait_for(lock, backoff, [this] { return stopping_; });
        } else {
          queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        }
        if (stopping_) return;
      }
      pump();
      backoff = down_ ? std::min(backoff * 2, max_backoff) : min_backoff;
    }
  });
}

void Relay::stop() {
  {
    std::lock_guard lock(queue_mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

std::size_t Relay::pending() const {
  std::lock_guard lock(queue_mu_);
  return queue_.size();
}

std::string relay_line(const NotificationPayload& payload) {
  return json{{"rai_content", payload.rai_content}, {"timestamp", payload.timestamp}}.dump();
}

Consumer::Consumer(Relay& relay, std::string relay_endpoint) : relay_(relay) {
  state_.relay_endpoint = std::move(relay_endpoint);
}

std::string Consumer::subscribe(const std::string& producer_url, const SubscriptionRequest& req,
                                const HttpTransport& transport) {
  auto base = parse_url(producer_url);
  if (!base) throw ConnectionFailed("invalid producer URL '" + producer_url + "'");
  Url target = *base;
  target.path = std::string(kSubscriptionsBase) + "/subscribe";

  auto reply = transport("POST", target, to_json(req).dump());
  if (!reply) throw ConnectionFailed("cannot reach producer at " + base->origin());
  if (reply->status != 201) throw Rejected(reply->status, reply->body);

  std::string id;
  try {
    id = json::parse(reply->body).at("id").get<std::string>();
  } catch (const json::exception&) {
    throw Rejected(reply->status, reply->body);
  }
  std::lock_guard lock(mu_);
  state_.subscription_id = id;
  spdlog::info("y1 consumer: subscribed with id {}", id);
  return id;
}

void Consumer::unsubscribe(const std::string& producer_url, const HttpTransport& transport) {
  std::optional<std::string> id;
  {
    std::lock_guard lock(mu_);
    id = state_.subscription_id;
  }
  if (!id) return;
  auto base = parse_url(producer_url);
  if (!base) throw ConnectionFailed("invalid producer URL '" + producer_url + "'");
  Url target = *base;
  target.path = std::string(kSubscriptionsBase) + "/unsubscribe?id=" + *id;
  auto reply = transport("DELETE", target, "");
  if (!reply) throw ConnectionFailed("cannot reach producer at " + base->origin());
  if (reply->status != 204) throw Rejected(reply->status, reply->body);
  std::lock_guard lock(mu_);
  state_.subscription_id.reset();
}

HttpReply Consumer::handle_notify(const std::string& body) {
  NotificationPayload payload;
  try {
    payload = parse_notification(json::parse(body));
  } catch (const std::exception& e) {
    spdlog::warn("y1 consumer: malformed notification: {}", e.what());
    return {400, json{{"error", "malformed payload"}}.dump()};
  }

  std::string line;
  {
    std::lock_guard lock(mu_);
    if (!state_.subscription_id || *state_.subscription_id != payload.subscription_id) {
      spdlog::warn("y1 consumer: dropping payload for unknown subscription {}",
                   payload.subscription_id);
      return {200, json{{"status", "dropped"}}.dump()};
    }
    // Same-format UTC timestamps order lexicographically.
    if (state_.latest_rai && payload.timestamp < state_.latest_rai->timestamp) {
      spdlog::warn("y1 consumer: dropping out-of-order payload at {}", payload.timestamp);
      return {200, json{{"status", "dropped"}}.dump()};
    }
    line = relay_line(payload);
    state_.latest_rai = std::move(payload);
    ++state_.received_count;
  }
  relay_.enqueue(std::move(line));
  return {200, json{{"status", "ok"}}.dump()};
}

HttpReply Consumer::handle(const ApiRequest& req) {
  if (req.path != "/notify") return {404, json{{"error", "not found"}}.dump()};
  if (req.method != "POST") return {405, json{{"error", "method not allowed"}}.dump()};
  return handle_notify(req.body);
}

ConsumerState Consumer::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

}  // namespace y1jam
