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

#include <doctest.h>

#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>

#include "y1jam/eval.hpp"
#include "y1jam/http.hpp"
#include "y1jam/live.hpp"
#include "y1jam/net.hpp"

using namespace y1jam;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

const std::string kCerts = Y1JAM_TEST_CERTS;

TlsConfig tls_with(const std::string& cert, const std::string& key) {
  TlsConfig t;
  t.enabled = true;
  t.cert_path = cert.empty() ? "" : kCerts + "/" + cert;
  t.key_path = key.empty() ? "" : kCerts + "/" + key;
  t.ca_path = kCerts + "/ca.crt";
  return t;
}

TlsConfig node_tls() { return tls_with("node.crt", "node.key"); }

json subscribe_body(const std::string& target = "https://127.0.0.1:1/notify") {
  return {{"raiType", kRaiTypePerformance},
          {"raiTypeVersion", "1.0"},
          {"notificationCriteria", {{"trigger", "PERIODIC"}, {"periodSeconds", 1}}},
          {"notificationTargetAddress", target}};
}

Url subscribe_url(const std::string& base) {
  return *parse_url(base + kSubscriptionsBase + "/subscribe");
}

}  // namespace

TEST_CASE("tcp line framing") {
  auto listener = TcpListener::bind("127.0.0.1", 0);
  REQUIRE(listener.port() > 0);
  auto client = TcpStream::connect("127.0.0.1", listener.port(), 1000ms);
  REQUIRE(client);
  auto server = listener.accept(1000ms);
  REQUIRE(server);
  CHECK(client->write_line("{\"a\":1}"));
  CHECK(client->write_line("second"));
  CHECK(server->read_line(1000ms) == "{\"a\":1}");
  CHECK(server->read_line(1000ms) == "second");
  CHECK_FALSE(server->read_line(20ms).has_value());
  CHECK(server->valid());
  client->close();
  CHECK_FALSE(server->read_line(500ms).has_value());
  CHECK_FALSE(server->valid());
}

TEST_CASE("port conflicts and endpoints") {
  auto a = TcpListener::bind("127.0.0.1", 0);
  CHECK_THROWS_AS(TcpListener::bind("127.0.0.1", a.port()), PortBindError);
  CHECK_FALSE(TcpStream::connect("127.0.0.1", 1, 200ms).has_value());
  CHECK(parse_endpoint("localhost:9000") == std::pair<std::string, int>{"localhost", 9000});
  CHECK_THROWS_AS(parse_endpoint("localhost"), std::invalid_argument);
  CHECK_THROWS_AS(parse_endpoint("h:0x"), std::invalid_argument);
}

TEST_CASE("test-mode HTTP server attributes requests to test-mode") {
  std::optional<std::string> seen;
  HttpServer server(TlsConfig{}, [&](const ApiRequest& req) {
    seen = req.client_identity;
    return HttpReply{200, json{{"path", req.path}, {"id", req.query.count("id") ? req.query.at("id") : ""}}.dump()};
  });
  const int port = server.bind("127.0.0.1", 0);
  server.start();
  const auto reply = http_request(TlsConfig{}, "DELETE", *parse_url("http://127.0.0.1:" + std::to_string(port) +
                                                                     "/x/unsubscribe?id=abc"), "");
  server.stop();
  REQUIRE(reply);
  CHECK(reply->status == 200);
  const auto j = json::parse(reply->body);
  CHECK(j.at("path") == "/x/unsubscribe");
  CHECK(j.at("id") == "abc");
  CHECK(seen == std::string(kTestModeIdentity));
  CHECK_FALSE(http_request(TlsConfig{}, "GET", *parse_url("http://127.0.0.1:1/"), "", 200ms).has_value());
}

TEST_CASE("mutual TLS admits only CA-signed clients") {
  REQUIRE(std::filesystem::exists(kCerts + "/node.crt"));
  SdlStore store;
  ProducerService svc(store, ProducerConfig{}, node_tls());
  const auto base = svc.start("127.0.0.1", 0);
  CHECK(base.rfind("https://", 0) == 0);
  const auto url = subscribe_url(base);
  const auto body = subscribe_body().dump();

  SUBCASE("valid certificate") {
    const auto r = http_request(node_tls(), "POST", url, body);
    REQUIRE(r);
    CHECK(r->status == 201);
    CHECK(svc.producer().active_subscriptions().size() == 1);
  }
  SUBCASE("no certificate") {
    CHECK_FALSE(http_request(tls_with("", ""), "POST", url, body).has_value());
    CHECK(svc.producer().active_subscriptions().empty());
  }
  SUBCASE("self-signed certificate") {
    CHECK_FALSE(http_request(tls_with("rogue.crt", "rogue.key"), "POST", url, body).has_value());
    CHECK(svc.producer().active_subscriptions().empty());
  }
  SUBCASE("plain HTTP") {
    auto plain = url;
    plain.scheme = "http";
    const auto r = http_request(TlsConfig{}, "POST", plain, body, 500ms);
    CHECK((!r || r->status >= 400));
    CHECK(svc.producer().active_subscriptions().empty());
  }
  svc.stop();
}

TEST_CASE("TLS settings from config and environment") {
  auto cfg = KeyValueConfig::parse("tls_cert = a.crt\ntls_key = a.key\ntls_ca = ca.crt\n");
  ::unsetenv("Y1_TLS_CERT");
  ::unsetenv("Y1_TLS_KEY");
  ::unsetenv("Y1_TLS_CA");
  ::unsetenv("Y1_TLS_DISABLE");
  auto t = TlsConfig::from_config(cfg);
  CHECK(t.enabled);
  CHECK(t.cert_path == "a.crt");
  ::setenv("Y1_TLS_DISABLE", "1", 1);
  CHECK_FALSE(TlsConfig::from_config(cfg).enabled);
  ::unsetenv("Y1_TLS_DISABLE");
  CHECK_FALSE(TlsConfig::from_env().enabled);
  CHECK(std::string(TlsConfig{}.scheme()) == "http");
}

TEST_CASE("jammer control channel round trip") {
  StrategyConfig s;
  s.kind = StrategyKind::Threshold;
  JammerController ctl(s, {});
  JammerService svc(ctl, "127.0.0.1", 0, 0, 300ms);
  svc.start();
  {
    auto relay = TcpStream::connect("127.0.0.1", svc.relay_port(), 1000ms);
    REQUIRE(relay);
    ControlClient control("127.0.0.1", svc.control_port());
    CHECK(control.request(0, 2000ms) == Verdict::NoJam);
    relay->write_line(json{{"rai_content", {{"dl_bitrate_bps", 4e6}}}, {"timestamp", SessionClock().iso8601(0)}}.dump());
    CHECK(control.request(1, 2000ms) == Verdict::Jam);
    // No analytics for tick 1: the service waits, then decides from tick 0.
    CHECK(control.request(2, 2000ms) == Verdict::Jam);
  }
  svc.stop();
  const auto log = ctl.log();
  REQUIRE(log.size() == 3);
  CHECK(log[2].snapshot->tick == 0);
  CHECK_THROWS_AS(ControlClient("127.0.0.1", 1), std::runtime_error);
}

TEST_CASE("relay over TCP reaches the jammer") {
  StrategyConfig s;
  s.kind = StrategyKind::Threshold;
  JammerController ctl(s, {});
  JammerService svc(ctl, "127.0.0.1", 0, 0);
  svc.start();
  Relay relay(std::make_unique<TcpRelayLink>("127.0.0.1", svc.relay_port()));
  relay.start();
  for (int t = 0; t < 5; ++t)
    relay.enqueue(json{{"rai_content", json::object()}, {"timestamp", SessionClock().iso8601(t)}}.dump());
  CHECK(ctl.wait_for_analytics(4, 3000ms));
  relay.stop();
  svc.stop();
}

TEST_CASE("live loop over mutual TLS matches the virtual loop") {
  ExperimentConfig cfg;
  cfg.scenario = ScenarioKind::Custom;
  cfg.custom = TrafficScenario{{{6, 4'000'000}, {4, 0}, {5, 2'000'000}, {5, 0}}, 3, 20};
  cfg.seed = 3;
  cfg.strategy.kind = StrategyKind::Threshold;
  cfg.tls = node_tls();
  cfg.tick_duration = 10ms;
  const auto scenario = cfg.build_scenario();
  const auto virt = run_virtual_loop(scenario, cfg, cfg.strategy);
  const auto live = run_live_loop(scenario, cfg, cfg.strategy);
  CHECK(live.decisions == virt.decisions);
  CHECK(live.records == virt.records);
}
