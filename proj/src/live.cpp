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

#include "y1jam/live.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace y1jam {

using nlohmann::json;
using std::chrono::milliseconds;

NotificationSender http_sender(const TlsConfig& tls) {
  return [tls](const std::string& target, const std::string& body) {
    auto url = parse_url(target);
    if (!url) return false;
    auto reply = http_request(tls, "POST", *url, body);
    return reply && reply->status / 100 == 2;
  };
}

HttpTransport http_transport(const TlsConfig& tls) {
  return [tls](const std::string& method, const Url& url, const std::string& body) {
    return http_request(tls, method, url, body);
  };
}

LogicalDispatcher::LogicalDispatcher(Producer& producer) : producer_(producer) {}

LogicalDispatcher::~LogicalDispatcher() { stop(); }

void LogicalDispatcher::start() {
  stopping_ = false;
  thread_ = std::thread([this] {
    std::unique_lock lock(mu_);
    while (true) {
      cv_.wait(lock, [this] { return stopping_ || target_ != done_; });
      if (stopping_) return;
      const double now = *target_;
      lock.unlock();
      producer_.dispatch(now);
      lock.lock();
      done_ = now;
      cv_.notify_all();
    }
  });
}

void LogicalDispatcher::advance_to(double now_s) {
  {
    std::lock_guard lock(mu_);
    target_ = now_s;
  }
  cv_.notify_all();
}

void LogicalDispatcher::drain() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return stopping_ || target_ == done_; });
}

void LogicalDispatcher::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

ProducerService::ProducerService(const SdlStore& store, ProducerConfig config, TlsConfig tls)
    : tls_(tls),
      producer_(store,
                [&] {
                  config.require_client_identity = tls.enabled;
                  return config;
                }(),
                http_sender(tls)),
      server_(tls, [this](const ApiRequest& req) { return producer_.handle(req); }),
      dispatcher_(producer_) {}

ProducerService::~ProducerService() { stop(); }

std::string ProducerService::start(const std::string& host, int port) {
  const int bound = server_.bind(host, port);
  server_.start();
  dispatcher_.start();
  running_ = true;
  return fmt::format("{}://{}:{}", tls_.scheme(), host, bound);
}

void ProducerService::stop() {
  if (!running_) return;
  running_ = false;
  dispatcher_.stop();
  server_.stop();
}

ConsumerService::ConsumerService(TlsConfig tls, const std::string& relay_host, int relay_port)
    : tls_(tls),
      relay_(std::make_unique<TcpRelayLink>(relay_host, relay_port)),
      consumer_(relay_, fmt::format("{}:{}", relay_host, relay_port)),
      server_(tls, [this](const ApiRequest& req) { return consumer_.handle(req); }) {}

ConsumerService::~ConsumerService() { stop(); }

std::string ConsumerService::start(const std::string& host, int port) {
  const int bound = server_.bind(host, port);
  relay_.start();
  server_.start();
  running_ = true;
  return fmt::format("{}://{}:{}/notify", tls_.scheme(), host, bound);
}

void ConsumerService::stop() {
  if (!running_) return;
  running_ = false;
  server_.stop();
  relay_.stop();
}

JammerService::JammerService(JammerController& controller, const std::string& host, int relay_port,
                             int control_port, milliseconds analytics_wait)
    : controller_(controller),
      relay_(TcpListener::bind(host, relay_port)),
      control_(TcpListener::bind(host, control_port)),
      analytics_wait_(analytics_wait) {}

JammerService::~JammerService() { stop(); }

void JammerService::start() {
  stopping_ = false;
  relay_thread_ = std::thread([this] { relay_loop(); });
  control_thread_ = std::thread([this] { control_loop(); });
}

void JammerService::stop() {
  stopping_ = true;
  if (relay_thread_.joinable()) relay_thread_.join();
  if (control_thread_.joinable()) control_thread_.join();
  relay_.close();
  control_.close();
}

void JammerService::relay_loop() {
  while (!stopping_) {
    auto conn = relay_.accept(milliseconds(50));
    if (!conn) continue;
    spdlog::debug("jammer: relay connected");
    while (!stopping_ && conn->valid()) {
      if (auto line = conn->read_line(milliseconds(50))) controller_.ingest_line(*line);
    }
  }
}

void JammerService::control_loop() {
  while (!stopping_) {
    auto conn = control_.accept(milliseconds(50));
    if (!conn) continue;
    while (!stopping_ && conn->valid()) {
      auto line = conn->read_line(milliseconds(50));
      if (!line) continue;
      std::int64_t tick = 0;
      try {
        tick = json::parse(*line).at("tick").get<std::int64_t>();
      } catch (const json::exception& e) {
        spdlog::warn("jammer: bad control message: {}", e.what());
        continue;
      }
      if (tick > 0 && !controller_.wait_for_analytics(tick - 1, analytics_wait_)) {
        spdlog::warn("jammer: no analytics for tick {} after {} ms", tick - 1,
                     analytics_wait_.count());
      }
      const auto d = controller_.decide(tick);
      conn->write_line(json{{"tick", tick}, {"verdict", to_string(d.verdict)}}.dump());
    }
  }
}

ControlClient::ControlClient(const std::string& host, int port) {
  auto s = TcpStream::connect(host, port, milliseconds(2000));
  if (!s) throw std::runtime_error(fmt::format("cannot reach jammer control at {}:{}", host, port));
  stream_ = std::move(*s);
}

Verdict ControlClient::request(std::int64_t tick, milliseconds timeout) {
  if (!stream_.write_line(json{{"tick", tick}}.dump())) {
    throw std::runtime_error("jammer control channel closed");
  }
  auto line = stream_.read_line(timeout);
  if (!line) throw std::runtime_error(fmt::format("no verdict from jammer for tick {}", tick));
  try {
    const auto j = json::parse(*line);
    if (j.at("tick").get<std::int64_t>() != tick) {
      throw std::runtime_error(fmt::format("jammer answered tick {} for {}", j.at("tick").dump(), tick));
    }
    const auto verdict = j.at("verdict").get<std::string>();
    if (verdict == "JAM") return Verdict::Jam;
    if (verdict == "NO_JAM") return Verdict::NoJam;
    throw std::runtime_error("unknown verdict " + verdict);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed jammer reply: ") + e.what());
  }
}

}  // namespace y1jam
