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

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "y1jam/config.hpp"
#include "y1jam/y1_types.hpp"

namespace y1jam {

/// Mutual-TLS material. When `enabled` is false the service runs in test
/// mode: plain HTTP and every request is attributed to "test-mode".
struct TlsConfig {
  bool enabled = false;
  std::string cert_path;
  std::string key_path;
  std::string ca_path;

  /// Y1_TLS_CERT / Y1_TLS_KEY / Y1_TLS_CA; Y1_TLS_DISABLE=1 forces test mode.
  static TlsConfig from_env();
  /// tls_cert / tls_key / tls_ca / tls_disable keys, then environment overrides.
  static TlsConfig from_config(const KeyValueConfig& cfg);

  const char* scheme() const { return enabled ? "https" : "http"; }
};

inline constexpr const char* kTestModeIdentity = "test-mode";

/// HTTP(S) server that forwards every request to one handler. With TLS
/// enabled it requires a client certificate signed by the configured CA;
/// clients without one fail the handshake and never reach the handler.
class HttpServer {
 public:
  using Handler = std::function<HttpReply(const ApiRequest&)>;

  HttpServer(TlsConfig tls, Handler handler);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port` (0 = ephemeral) and returns the bound port.
  /// Throws PortBindError.
  int bind(const std::string& host, int port);
  /// Serves on a background thread until stop().
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One blocking HTTP(S) exchange. Returns nullopt on connection or TLS
/// failure. With TLS enabled the client presents its certificate and
/// verifies the server against the CA.
std::optional<HttpReply> http_request(const TlsConfig& tls, const std::string& method,
                                      const Url& url, const std::string& body,
                                      std::chrono::milliseconds timeout =
                                          std::chrono::milliseconds(2000));

}  // namespace y1jam
