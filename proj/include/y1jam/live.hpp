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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "y1jam/http.hpp"
#include "y1jam/jammer.hpp"
#include "y1jam/net.hpp"
#include "y1jam/sdl_store.hpp"
#include "y1jam/y1_consumer.hpp"
#include "y1jam/y1_producer.hpp"

namespace y1jam {

/// Sends notifications with http_request; 2xx counts as delivered.
NotificationSender http_sender(const TlsConfig& tls);
/// Consumer-to-producer transport over http_request.
HttpTransport http_transport(const TlsConfig& tls);

/// Runs Producer::dispatch on its own thread whenever the session clock is
/// advanced, so notification delivery never blocks the simulation driver.
class LogicalDispatcher {
 public:
  explicit LogicalDispatcher(Producer& producer);
  ~LogicalDispatcher();
  LogicalDispatcher(const LogicalDispatcher&) = delete;
  LogicalDispatcher& operator=(const LogicalDispatcher&) = delete;

  void start();
  void advance_to(double now_s);
  /// Blocks until every advance so far has been dispatched.
  void drain();
  void stop();

 private:
  Producer& producer_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::optional<double> target_;
  std::optional<double> done_;
  bool stopping_ = false;
  std::thread thread_;
};

/// Producer behind an HTTP(S) server with a logical-clock dispatcher.
class ProducerService {
 public:
  ProducerService(const SdlStore& store, ProducerConfig config, TlsConfig tls);
  ~ProducerService();

  /// Binds and serves; returns the base URL (scheme://host:port).
  std::string start(const std::string& host, int port);
  void stop();

  Producer& producer() { return producer_; }
  LogicalDispatcher& dispatcher() { return dispatcher_; }

 private:
  TlsConfig tls_;
  Producer producer_;
  HttpServer server_;
  LogicalDispatcher dispatcher_;
  bool running_ = false;
};

/// Consumer serving /notify and relaying to the jammer over TCP.
class ConsumerService {
 public:
  ConsumerService(TlsConfig tls, const std::string& relay_host, int relay_port);
  ~ConsumerService();

  /// Binds and serves; returns the notify URL.
  std::string start(const std::string& host, int port);
  void stop();

  Consumer& consumer() { return consumer_; }
  Relay& relay() { return relay_; }

 private:
  TlsConfig tls_;
  Relay relay_;
  Consumer consumer_;
  HttpServer server_;
  bool running_ = false;
};

/// Jammer side: a relay listener feeding the controller and a control
/// listener that answers `{"tick":t}` with `{"tick":t,"verdict":...}`.
/// Before answering tick t > 0 it waits up to `analytics_wait` for the
/// analytics of tick t-1.
class JammerService {
 public:
  JammerService(JammerController& controller, const std::string& host, int relay_port,
                int control_port,
                std::chrono::milliseconds analytics_wait = std::chrono::milliseconds(2000));
  ~JammerService();

  int relay_port() const { return relay_.port(); }
  int control_port() const { return control_.port(); }

  void start();
  void stop();

 private:
  void relay_loop();
  void control_loop();

  JammerController& controller_;
  TcpListener relay_;
  TcpListener control_;
  std::chrono::milliseconds analytics_wait_;
  std::atomic<bool> stopping_{false};
  std::thread relay_thread_;
  std::thread control_thread_;
};

/// Driver end of the jammer control channel.
class ControlClient {
 public:
  /// Throws std::runtime_error when the jammer cannot be reached.
  ControlClient(const std::string& host, int port);
  /// Throws std::runtime_error on timeout or a malformed reply.
  Verdict request(std::int64_t tick, std::chrono::milliseconds timeout);

 private:
  TcpStream stream_;
};

}  // namespace y1jam
