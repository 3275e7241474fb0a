#include <doctest.h>

#include <algorithm>
#include <string>

#include "hetcell/scenario.hpp"
#include "support.hpp"

using namespace hetcell;

namespace {

bool has_error(const ParseResult& r, const std::string& prefix) {
  return std::any_of(r.errors.begin(), r.errors.end(), [&](const std::string& e) { return e.rfind(prefix, 0) == 0; });
}

ScenarioConfig random_config(ref::Gen& g) {
  ScenarioConfig c;
  if (g.coin()) {
    c.clients = static_cast<int>(g.range(1, 60));
    c.client_radius_m = g.real(0.0, 50.0);
  } else {
    const int n = static_cast<int>(g.range(1, 8));
    for (int i = 0; i < n; ++i) c.client_list.push_back({{g.real(-80, 80), g.real(-80, 80)}, g.coin()});
  }
  c.ap = {g.real(-10, 10), g.real(-10, 10)};
  c.ap_standard_ssid_dbm = g.real(0, 20);
  c.ap_integrated_ssid_dbm = c.ap_standard_ssid_dbm + g.real(0, 20);
  c.client_tx_dbm = g.real(0, 20);
  c.indoor_radius_m = g.coin() ? 0.0 : g.real(1, 40);
  c.mode = kAllModes[static_cast<std::size_t>(g.range(0, 3))];
  c.prefer_integrated = g.coin();
  c.mac.slot_us = static_cast<int>(g.range(1, 20));
  c.mac.sifs_us = static_cast<int>(g.range(1, 30));
  c.mac.difs_us = c.mac.sifs_us + 2 * c.mac.slot_us;
  c.mac.cw_min = (1 << g.range(1, 6)) - 1;
  c.mac.cw_max = (1 << g.range(6, 11)) - 1;
  c.mac.retry_limit = g.coin() ? kUnlimitedRetries : static_cast<int>(g.range(0, 10));
  c.mac.ack_timeout_us = g.coin() ? 0 : static_cast<int>(g.range(40, 200));
  c.mac.cs_threshold_dbm = g.real(-95, -60);
  c.phy.data_rate_mbps = g.coin() ? 54.0 : 24.0;
  c.path_loss.exponent = g.real(2.0, 5.0);
  c.path_loss.wall_penetration_db = g.real(0.0, 20.0);
  c.budget.capture_threshold_db = g.real(3.0, 20.0);
  c.lte.duplex = g.coin() ? Duplex::FDD : Duplex::TDD;
  c.lte.ul_fraction = g.real(0.0, 1.0);
  c.lte.dl_capacity_mbps = g.real(0, 200);
  c.tunnel.path = g.coin() ? TunnelPath::ViaCore : TunnelPath::DirectEnbAp;
  c.tunnel.direct_latency_us = g.range(0, 5000);
  c.hybrid_ack_timeout_us = g.coin() ? 0 : g.range(1000, 50000);
  c.flow.direction = static_cast<FlowDirection>(g.range(0, 2));
  if (g.coin()) {
    c.flow.source = SourceKind::ConstantRate;
    c.flow.rate_mbps = g.real(0.1, 50.0);
  }
  c.flow.segment_bytes = static_cast<int>(g.range(1, 2304));
  c.flow.transport = g.coin() ? TransportKind::Reliable : TransportKind::None;
  c.ack.segments_per_ack = static_cast<int>(g.range(1, 8));
  c.subflow.wifi_ul_cost = g.real(0, 20);
  c.subflow.rtt_weight = g.real(0, 3);
  c.tight_epoch_us = g.range(1000, 50000);
  c.mgmt_interval_us = g.coin() ? 0 : g.range(1000, 1000000);
  if (g.coin()) {
    c.dl_only_period_us = g.range(40000, 200000);
    c.dl_only_window_us = g.range(1, 32000);
  }
  if (g.coin()) {
    c.interferer.start_us = g.range(0, 1000000);
    c.interferer.stop_us = c.interferer.start_us + g.range(1, 1000000);
    c.interferer.pos = {g.real(-50, 50), g.real(-50, 50)};
    c.interferer.burst_us = g.range(1, 5000);
  }
  c.duration_s = g.real(0.001, 30.0);
  c.seed = g.next();
  return c;
}

}  // namespace

TEST_CASE("minimal scenario fills every default") {
  const ParseResult r = parse_scenario("clients: 10\nmode: standard\nduration_s: 10\nseed: 1\n");
  REQUIRE(r.ok());
  CHECK(*r.config == ScenarioConfig{});
  const ParseResult empty = parse_scenario("");
  REQUIRE(empty.ok());
  CHECK(*empty.config == ScenarioConfig{});
}

TEST_CASE("defaults describe the reference cell") {
  const ScenarioConfig c;
  CHECK(c.mac.slot_us == 9);
  CHECK(c.mac.sifs_us == 16);
  CHECK(c.mac.difs_us == 34);
  CHECK(c.mac.cw_min == 15);
  CHECK(c.mac.cw_max == 1023);
  CHECK(c.mac.retry_limit == 7);
  CHECK(c.phy.data_rate_mbps == 54.0);
  CHECK(c.flow.direction == FlowDirection::Bidirectional);
  CHECK(c.flow.source == SourceKind::Saturated);
  CHECK(c.tunnel.via_core_latency_us == 10000);
  CHECK(c.tunnel.direct_latency_us == 2000);
  CHECK(c.effective_hybrid_ack_timeout_us() == 24000);
  CHECK(validate(c).empty());
}

TEST_CASE("cw_min must be 2^k - 1") {
  const ParseResult r = parse_scenario("cw_min: 14\n");
  CHECK_FALSE(r.ok());
  CHECK(has_error(r, "cw_min: must be 2^k - 1"));
}

TEST_CASE("CTS-to-Self window above 32 ms is rejected") {
  const ParseResult bad = parse_scenario("dl_only_period_us: 100000\ndl_only_window_us: 33000\n");
  CHECK_FALSE(bad.ok());
  CHECK(has_error(bad, "dl_only_window_us:"));
  CHECK(bad.errors.front().find("32 ms") != std::string::npos);
  CHECK(parse_scenario("dl_only_period_us: 100000\ndl_only_window_us: 32000\n").ok());
  CHECK_FALSE(parse_scenario("dl_only_period_us: 100000\ndl_only_window_us: 32001\n").ok());
}

TEST_CASE("every problem is reported with its field") {
  const ParseResult r = parse_scenario(
      "cw_min: 14\nlte_ul_fraction: 1.5\nduration_s: 0\nbogus: 1\nmode: turbo\nclients: x\ndifs_us: 40\n");
  CHECK_FALSE(r.ok());
  CHECK(has_error(r, "cw_min:"));
  CHECK(has_error(r, "lte_ul_fraction:"));
  CHECK(has_error(r, "duration_s:"));
  CHECK(has_error(r, "bogus: unknown key"));
  CHECK(has_error(r, "mode:"));
  CHECK(has_error(r, "clients:"));
  CHECK(has_error(r, "difs_us:"));
}

TEST_CASE("duplicate keys and malformed documents are errors") {
  CHECK(has_error(parse_scenario("seed: 1\nseed: 2\n"), "seed: duplicate key"));
  CHECK(has_error(parse_scenario("[1, 2]"), "<document>:"));
  CHECK(has_error(parse_scenario("a: [unclosed"), "<document>:"));
}

TEST_CASE("retry_limit accepts unlimited") {
  const ParseResult r = parse_scenario("retry_limit: unlimited\n");
  REQUIRE(r.ok());
  CHECK(r.config->mac.unlimited_retries());
  CHECK_FALSE(parse_scenario("retry_limit: -3\n").ok());
}

TEST_CASE("explicit client list with capability flags") {
  const ParseResult r = parse_scenario("client_list:\n  - {x: 40, y: 0}\n  - {x: 3, y: 4, capable: false}\n");
  REQUIRE(r.ok());
  REQUIRE(r.config->client_list.size() == 2);
  CHECK(r.config->client_list[1].pos == Position{3, 4});
  CHECK_FALSE(r.config->client_list[1].capable);
  CHECK(r.config->resolved_clients().size() == 2);
}

TEST_CASE("clients are spread on a circle around the AP") {
  ScenarioConfig c;
  c.clients = 7;
  c.client_radius_m = 12.0;
  c.ap = {1.0, -2.0};
  for (const ClientSpec& s : c.resolved_clients()) CHECK(distance_m(s.pos, c.ap) == doctest::Approx(12.0));
}

TEST_CASE("property: to_yaml then parse gives the same configuration") {
  ref::Gen g(71);
  for (int i = 0; i < 300; ++i) {
    const ScenarioConfig c = random_config(g);
    REQUIRE(validate(c).empty());
    const ParseResult r = parse_scenario(to_yaml(c));
    REQUIRE(r.ok());
    CHECK(*r.config == c);
    CHECK(to_yaml(*r.config) == to_yaml(c));
  }
}

TEST_CASE("loading a missing file reports the path") {
  const ParseResult r = load_scenario_file("/nonexistent/scenario.yaml");
  CHECK_FALSE(r.ok());
  REQUIRE_FALSE(r.errors.empty());
  CHECK(r.errors.front().find("/nonexistent/scenario.yaml") != std::string::npos);
}
