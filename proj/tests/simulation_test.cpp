#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "hetcell/simulation.hpp"
#include "support.hpp"

using namespace hetcell;

namespace {

SimTime partition(const MetricsReport& r) {
  SimTime t = r.overlap_us + r.idle_us;
  for (SimTime v : r.exclusive_us) t += v;
  return t;
}

SimTime air(const MetricsReport& r, AirClass c) { return r.airtime_us[static_cast<std::size_t>(c)]; }

}  // namespace

TEST_CASE("airtime partition covers the whole run in every mode") {
  for (Mode m : kAllModes) {
    const MetricsReport r = run_scenario(testcfg::cell(6, m, 0.5));
    CHECK(partition(r) == 500000);
  }
}

TEST_CASE("same seed gives identical reports, a different seed does not") {
  const ScenarioConfig c = testcfg::cell(8, Mode::Standard, 0.5);
  const MetricsReport a = run_scenario(c);
  const MetricsReport b = run_scenario(c);
  CHECK(a == b);
  CHECK(to_csv(a) == to_csv(b));
  ScenarioConfig c2 = c;
  c2.seed = 2;
  const MetricsReport d = run_scenario(c2);
  CHECK(d.airtime_us != a.airtime_us);
}

TEST_CASE("trace is deterministic and time ordered") {
  const ScenarioConfig c = testcfg::cell(3, Mode::Hybrid, 0.05);
  std::vector<TraceRecord> one, two;
  run_scenario(c, [&](const TraceRecord& t) { one.push_back(t); });
  run_scenario(c, [&](const TraceRecord& t) { two.push_back(t); });
  REQUIRE(one.size() == two.size());
  REQUIRE_FALSE(one.empty());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].time == two[i].time);
    CHECK(one[i].name == two[i].name);
    if (i > 0) CHECK(one[i].time >= one[i - 1].time);
  }
}

TEST_CASE("all clients associate at 5 m and every one sends") {
  const MetricsReport r = run_scenario(testcfg::cell(5, Mode::Standard, 0.5));
  CHECK(r.associated == 5);
  for (const StationReport& s : r.stations) {
    if (s.role == "client") {
      CHECK(s.associated);
      CHECK(s.ul_wifi_mbps > 0.0);
    }
  }
}

TEST_CASE("hybrid puts nothing on the Wi-Fi uplink") {
  ScenarioConfig c = testcfg::cell(10, Mode::Hybrid, 1.0);
  c.flow.transport = TransportKind::Reliable;
  const MetricsReport r = run_scenario(c);
  CHECK(r.wifi_ul_airtime_us == 0);
  CHECK(r.ul_wifi_mbps == 0.0);
  CHECK(r.dl_wifi_mbps > 0.0);
  CHECK(r.ul_tunnel_mbps > 0.0);
  CHECK(air(r, AirClass::DlMacAck) == 0);  // clients never answer with an on-air ACK
}

TEST_CASE("tunnel bytes are conserved") {
  ScenarioConfig c = testcfg::cell(10, Mode::Hybrid, 1.0);
  c.flow.transport = TransportKind::Reliable;
  const MetricsReport r = run_scenario(c);
  CHECK(r.tunnel_sent_bytes > 0);
  CHECK(r.tunnel_sent_bytes == r.tunnel_ingested_bytes + r.tunnel_in_flight_bytes);
  CHECK(r.ap_tunnel_delivered_bytes == r.tunnel_ingested_bytes);
}

TEST_CASE("tunnelled ACKs arriving after the timeout cause retransmissions and duplicates") {
  ScenarioConfig c = testcfg::cell(3, Mode::Hybrid, 1.0);
  c.flow.direction = FlowDirection::Downlink;
  c.tunnel.via_core_latency_us = 50000;
  c.hybrid_ack_timeout_us = 20000;
  const MetricsReport late = run_scenario(c);
  CHECK(late.hybrid_retransmissions > 0);
  CHECK(late.late_acks > 0);
  CHECK(late.duplicates > 0);

  c.tunnel.via_core_latency_us = 10000;
  c.hybrid_ack_timeout_us = 0;
  const MetricsReport ok = run_scenario(c);
  CHECK(ok.duplicates < late.duplicates);
}

TEST_CASE("standard mode transport ACKs take Wi-Fi uplink airtime") {
  ScenarioConfig c = testcfg::cell(5, Mode::Standard, 1.0);
  c.flow.direction = FlowDirection::Downlink;
  c.flow.transport = TransportKind::Reliable;
  const MetricsReport r = run_scenario(c);
  CHECK(r.transport_acks > 0);
  CHECK(air(r, AirClass::UlTransportAck) > 0);
  CHECK(r.dl_wifi_mbps > 0.0);

  c.mode = Mode::Tight;
  const MetricsReport t = run_scenario(c);
  CHECK(air(t, AirClass::UlTransportAck) == 0);
  CHECK(t.lte_ul_bytes[static_cast<std::size_t>(TrafficClass::TransportAckForDl)] > 0);
}

TEST_CASE("an interferer pushes the tight splitter towards LTE") {
  ScenarioConfig c = testcfg::cell(5, Mode::Tight, 1.0);
  c.flow.direction = FlowDirection::Downlink;
  const MetricsReport quiet = run_scenario(c);
  c.interferer.start_us = 0;
  c.interferer.stop_us = 1000000;
  c.interferer.pos = {3.0, 0.0};
  c.interferer.burst_us = 2000;
  c.interferer.gap_us = 500;
  const MetricsReport noisy = run_scenario(c);
  const double share_quiet = quiet.dl_lte_mbps / quiet.dl_total_mbps;
  const double share_noisy = noisy.dl_lte_mbps / noisy.dl_total_mbps;
  CHECK(share_noisy > share_quiet);
  CHECK(air(noisy, AirClass::Interference) > 0);
}

TEST_CASE("raising the Wi-Fi uplink cost moves loose uplink onto LTE") {
  ScenarioConfig c = testcfg::cell(5, Mode::Loose, 1.0);
  c.flow.direction = FlowDirection::Uplink;
  c.subflow.wifi_ul_cost = 0.0;
  c.subflow.lte_ul_cost = 1.0;
  const MetricsReport cheap = run_scenario(c);
  c.subflow.wifi_ul_cost = 10.0;
  const MetricsReport dear = run_scenario(c);
  CHECK(cheap.ul_wifi_mbps > dear.ul_wifi_mbps);
  CHECK(dear.ul_lte_mbps > cheap.ul_lte_mbps);
  CHECK(dear.wifi_ul_airtime_us < cheap.wifi_ul_airtime_us);
}

TEST_CASE("TDD uplink share drives LTE uplink bytes monotonically") {
  ScenarioConfig c = testcfg::cell(5, Mode::Tight, 0.5);
  c.lte.duplex = Duplex::TDD;
  c.flow.direction = FlowDirection::Uplink;
  double prev = -1.0;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    c.lte.ul_fraction = f;
    const MetricsReport r = run_scenario(c);
    CHECK(r.ul_lte_mbps > prev);
    prev = r.ul_lte_mbps;
  }
}

TEST_CASE("ul_fraction is ignored under FDD") {
  ScenarioConfig c = testcfg::cell(5, Mode::Tight, 0.3);
  c.lte.ul_fraction = 0.1;
  const MetricsReport a = run_scenario(c);
  c.lte.ul_fraction = 0.9;
  MetricsReport b = run_scenario(c);
  b.config_yaml = a.config_yaml;
  CHECK(a == b);
}

TEST_CASE("a far client misses the standard SSID but joins on the integrated one") {
  ScenarioConfig c = testcfg::cell(1, Mode::Tight, 1.0);
  c.client_list = {{{40.0, 0.0}, true}, {{40.0, 0.0}, false}, {{3.0, 0.0}, true}};
  const MetricsReport r = run_scenario(c);
  REQUIRE(r.stations.size() == 4);
  CHECK(r.stations[1].mode == "hybrid");
  CHECK(r.stations[1].associated);
  CHECK(r.stations[2].mode == "lte_only");
  CHECK_FALSE(r.stations[2].associated);
  CHECK(r.stations[3].mode == "tight");
  CHECK(r.lte_only == 1);
}

TEST_CASE("invalid configurations are refused") {
  ScenarioConfig c;
  c.mac.cw_min = 14;
  CHECK_THROWS_AS(run_scenario(c), std::invalid_argument);
}
