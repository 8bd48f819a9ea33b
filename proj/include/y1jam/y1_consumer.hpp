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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include "y1jam/net.hpp"
#include "y1jam/y1_types.hpp"

namespace y1jam {

// ---------------------------------------------------------------------------
// Relay: newline-delimited JSON towards the jammer.

/// Transport under the relay. Implementations need not be thread-safe; the
/// relay serializes all calls.
class RelayLink {
 public:
  virtual ~RelayLink() = default;
  virtual bool connected() const = 0;
  virtual bool connect() = 0;
  virtual bool write_line(std::string_view line) = 0;
  virtual void close() = 0;
};

/// TCP client link to the jammer's relay port.
class TcpRelayLink : public RelayLink {
 public:
  TcpRelayLink(std::string host, int port) : host_(std::move(host)), port_(port) {}
  bool connected() const override { return stream_.valid(); }
  bool connect() override;
  bool write_line(std::string_view line) override;
  void close() override { stream_.close(); }

 private:
  std::string host_;
  int port_;
  TcpStream stream_;
};

/// In-process link: hands each line to a callback. `up` can be toggled to
/// emulate an outage.
class CallbackRelayLink : public RelayLink {
 public:
  explicit CallbackRelayLink(std::function<void(std::string_view)> sink) : sink_(std::move(sink)) {}
  bool connected() const override { return connected_; }
  bool connect() override;
  bool write_line(std::string_view line) override;
  void close() override { connected_ = false; }

  std::atomic<bool> up{true};

 private:
  std::function<void(std::string_view)> sink_;
  bool connected_ = false;
};

/// Bounded forwarding queue (drop-oldest). Lines go out in arrival order
/// while the link is healthy; after an outage only the newest pending line
/// survives the reconnect.
class Relay {
 public:
  static constexpr std::size_t kDefaultCapacity = 64;

  explicit Relay(std::unique_ptr<RelayLink> link, std::size_t capacity = kDefaultCapacity);
  ~Relay();
  Relay(const Relay&) = delete;
  Relay& operator=(const Relay&) = delete;

  void enqueue(std::string line);
  /// Delivers what it can right now; returns the number of lines written.
  std::size_t pump();

  /// Background delivery with exponential reconnect backoff.
  void start(std::chrono::milliseconds min_backoff = std::chrono::milliseconds(20),
             std::chrono::milliseconds max_backoff = std::chrono::milliseconds(1000));
  void stop();

  std::size_t pending() const;
  std::uint64_t forwarded() const { return forwarded_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  struct Item {
    std::uint64_t seq;
    std::string line;
  };
  void collapse_to_newest_locked();

  std::unique_ptr<RelayLink> link_;
  std::size_t capacity_;

  mutable std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<Item> queue_;
  std::uint64_t next_seq_ = 0;

  std::mutex pump_mu_;
  bool down_ = false;
  std::atomic<std::uint64_t> forwarded_{0};
  std::atomic<std::uint64_t> dropped_{0};

  std::thread worker_;
  bool stopping_ = false;
};

/// The relay frame: `{"rai_content":{...},"timestamp":"..."}`.
std::string relay_line(const NotificationPayload& payload);

// ---------------------------------------------------------------------------
// Consumer

class ConnectionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Rejected : public std::runtime_error {
 public:
  Rejected(int status, std::string body)
      : std::runtime_error("producer rejected request with status " + std::to_string(status)),
        status_(status),
        body_(std::move(body)) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

/// One HTTP exchange towards the producer; nullopt means the connection failed.
using HttpTransport = std::function<std::optional<HttpReply>(
    const std::string& method, const Url& url, const std::string& body)>;

struct ConsumerState {
  std::optional<std::string> subscription_id;
  std::optional<NotificationPayload> latest_rai;
  std::uint64_t received_count = 0;
  std::string relay_endpoint;
};

/// Y1 consumer: owns the subscription, accepts /notify and forwards every
/// accepted payload to the relay. HTTP handling answers before the relay
/// delivers.
class Consumer {
 public:
  Consumer(Relay& relay, std::string relay_endpoint = {});

  /// Registers with the producer at `producer_url` (scheme://host:port).
  /// Throws ConnectionFailed or Rejected; state is unchanged on error.
  std::string subscribe(const std::string& producer_url, const SubscriptionRequest& req,
                        const HttpTransport& transport);
  /// Cancels the current subscription, if any.
  void unsubscribe(const std::string& producer_url, const HttpTransport& transport);

  HttpReply handle_notify(const std::string& body);
  /// Routes POST /notify; anything else is 404.
  HttpReply handle(const ApiRequest& req);

  ConsumerState state() const;

 private:
  Relay& relay_;
  mutable std::mutex mu_;
  ConsumerState state_;
};

}  // namespace y1jam
