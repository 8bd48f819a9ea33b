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

#include "y1jam/http.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>
#include <spdlog/spdlog.h>

#include "y1jam/net.hpp"

namespace y1jam {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

void apply_env(TlsConfig& tls) {
  if (auto v = env("Y1_TLS_CERT")) tls.cert_path = *v;
  if (auto v = env("Y1_TLS_KEY")) tls.key_path = *v;
  if (auto v = env("Y1_TLS_CA")) tls.ca_path = *v;
  tls.enabled = !tls.cert_path.empty() && !tls.key_path.empty() && !tls.ca_path.empty();
  if (env("Y1_TLS_DISABLE").value_or("0") == "1") tls.enabled = false;
}

std::optional<std::string> peer_subject(const httplib::Request& req) {
  if (req.ssl == nullptr) return std::nullopt;
  X509* cert = SSL_get1_peer_certificate(req.ssl);
  if (cert == nullptr) return std::nullopt;
  char buf[512];
  X509_NAME_oneline(X509_get_subject_name(cert), buf, sizeof buf);
  X509_free(cert);
  return std::string(buf);
}

}  // namespace

TlsConfig TlsConfig::from_env() {
  TlsConfig tls;
  apply_env(tls);
  return tls;
}

TlsConfig TlsConfig::from_config(const KeyValueConfig& cfg) {
  TlsConfig tls;
  tls.cert_path = cfg.get_string("tls_cert", "");
  tls.key_path = cfg.get_string("tls_key", "");
  tls.ca_path = cfg.get_string("tls_ca", "");
  apply_env(tls);
  if (cfg.get_string("tls_disable", "0") == "1") tls.enabled = false;
  return tls;
}

struct HttpServer::Impl {
  TlsConfig tls;
  Handler handler;
  std::unique_ptr<httplib::Server> server;
  std::thread thread;
};

HttpServer::HttpServer(TlsConfig tls, Handler handler) : impl_(std::make_unique<Impl>()) {
  impl_->tls = std::move(tls);
  impl_->handler = std::move(handler);
  if (impl_->tls.enabled) {
    auto ssl = std::make_unique<httplib::SSLServer>(impl_->tls.cert_path.c_str(),
                                                    impl_->tls.key_path.c_str(),
                                                    impl_->tls.ca_path.c_str());
    if (!ssl->is_valid()) throw ConfigError("cannot load TLS certificate, key or CA");
    impl_->server = std::move(ssl);
  } else {
    impl_->server = std::make_unique<httplib::Server>();
  }

  auto forward = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api;
    api.method = req.method;
    api.path = req.path;
    for (const auto& [k, v] : req.params) api.query[k] = v;
    api.body = req.body;
    api.client_identity = impl->tls.enabled ? peer_subject(req)
                                            : std::optional<std::string>(kTestModeIdentity);
    const auto reply = impl->handler(api);
    res.status = reply.status;
    if (!reply.body.empty()) res.set_content(reply.body, reply.content_type);
  };
  impl_->server->Get(".*", forward);
  impl_->server->Post(".*", forward);
  impl_->server->Put(".*", forward);
  impl_->server->Delete(".*", forward);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server->bind_to_any_port(host);
    if (bound < 0) throw PortBindError("cannot bind an ephemeral port on " + host);
  } else if (!impl_->server->bind_to_port(host, port)) {
    throw PortBindError("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::start() {
  impl_->thread = std::thread([s = impl_->server.get()] { s->listen_after_bind(); });
  impl_->server->wait_until_ready();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server->stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::optional<HttpReply> http_request(const TlsConfig& tls, const std::string& method,
                                      const Url& url, const std::string& body,
                                      std::chrono::milliseconds timeout) {
  std::unique_ptr<httplib::Client> cli;
  if (url.scheme == "https" && tls.enabled) {
    cli = std::make_unique<httplib::Client>(url.origin(), tls.cert_path, tls.key_path);
    cli->set_ca_cert_path(tls.ca_path.c_str());
    cli->enable_server_certificate_verification(true);
  } else {
    cli = std::make_unique<httplib::Client>(url.origin());
    cli->enable_server_certificate_verification(false);
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  cli->set_connection_timeout(secs.count(), usecs.count());
  cli->set_read_timeout(secs.count(), usecs.count());
  cli->set_write_timeout(secs.count(), usecs.count());

  httplib::Result res;
  constexpr const char* kJson = "application/json";
  if (method == "POST") {
    res = cli->Post(url.path, body, kJson);
  } else if (method == "PUT") {
    res = cli->Put(url.path, body, kJson);
  } else if (method == "DELETE") {
    res = cli->Delete(url.path);
  } else if (method == "GET") {
    res = cli->Get(url.path);
  } else {
    throw std::invalid_argument("unsupported HTTP method " + method);
  }
  if (!res) {
    spdlog::debug("http {} {} failed: {}", method, url.to_string(), httplib::to_string(res.error()));
    return std::nullopt;
  }
  return HttpReply{res->status, res->body, res->get_header_value("Content-Type")};
}

}  // namespace y1jam
