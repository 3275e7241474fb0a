// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Tolerances are fixed here and nowhere else.
//
//   hetcell_acceptance [--golden-dir DIR] [--update-golden]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hetcell/oracle.hpp"
#include "hetcell/radio.hpp"
#include "hetcell/simulation.hpp"
#include "support.hpp"

using namespace hetcell;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Saturated uplink, co-located, unlimited retries, no management load.
ScenarioConfig saturation_cell(int n, int cw_min, double seconds) {
  ScenarioConfig c;
  c.clients = n;
  c.client_radius_m = 0.0;
  c.mac.cw_min = cw_min;
  c.mac.retry_limit = kUnlimitedRetries;
  c.flow.direction = FlowDirection::Uplink;
  c.mgmt_interval_us = 0;
  c.duration_s = seconds;
  return c;
}

// 1: simulated saturation throughput within 10% of the fixed-point model.
Outcome oracle_equivalence() {
  Outcome o;
  constexpr double kTolerance = 0.10;
  constexpr double kWallLimitS = 60.0;
  double worst = 0.0;
  double slowest = 0.0;
  for (int cw : {15, 31}) {
    for (int n : {1, 5, 10, 20, 50}) {
      const ScenarioConfig c = saturation_cell(n, cw, 10.0);
      const auto t0 = std::chrono::steady_clock::now();
      const MetricsReport r = run_scenario(c);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const double model = saturation_throughput(bianchi_params(n, c.mac, c.phy, c.flow.segment_bytes));
      const double err = std::abs(r.ul_total_mbps - model) / model;
      worst = std::max(worst, err);
      slowest = std::max(slowest, wall);
      if (err > kTolerance) {
        o.fail(fmt("n=%g cw=%g off by %.2f%%", n, cw, 100.0 * err));
      }
      if (wall > kWallLimitS) o.fail(fmt("n=%g cw=%g took %.1f s", n, cw, wall));
    }
  }
  o.note(fmt("worst error %.2f%% (limit 10%%), slowest point %.2f s (limit 60 s)", 100.0 * worst, slowest));
  return o;
}

// 2: throughput falls with n from 10 up, and cw 31 loses at n=2 but wins at n=50.
Outcome throughput_shape() {
  Outcome o;
  auto total = [](int n, int cw) {
    ScenarioConfig c;
    c.clients = n;
    c.mac.cw_min = cw;
    c.duration_s = 10.0;
    return run_scenario(c).total_mbps;
  };
  double prev = 0.0;
  std::string series;
  for (int n : {10, 15, 20, 30, 40, 50}) {
    const double t = total(n, 15);
    series += (series.empty() ? "" : " ") + fmt("%.2f", t);
    if (n > 10 && t > prev) o.fail(fmt("total rose from %.3f to %.3f at n=%g", prev, t, n));
    prev = t;
  }
  o.note("n=10..50 cw15 total " + series);
  const double a15 = total(2, 15), a31 = total(2, 31);
  const double b15 = total(50, 15), b31 = total(50, 31);
  if (!(a31 < a15)) o.fail("cw31 not below cw15 at n=2");
  if (!(b31 > b15)) o.fail("cw31 not above cw15 at n=50");
  o.note(fmt("n=2: cw15 %.2f cw31 %.2f", a15, a31) + fmt(", n=50: cw15 %.2f cw31 %.2f", b15, b31));
  return o;
}

// 3: coverage arithmetic.
Outcome coverage_arithmetic() {
  Outcome o;
  const double want = std::pow(100.0, 0.25);
  const double ratio = range_ratio(4000.0, 40.0, 4.0);
  const double area = area_ratio(4000.0, 40.0, 4.0);
  if (std::abs(ratio - want) > 1e-9) o.fail(fmt("range ratio %.12f", ratio));
  if (std::abs(area - 10.0) > 1e-8) o.fail(fmt("area ratio %.12f", area));
  const ScenarioConfig d;
  LinkBudget hi = d.budget, lo = d.budget;
  hi.tx_power_dbm = d.ap_integrated_ssid_dbm;
  lo.tx_power_dbm = d.ap_standard_ssid_dbm;
  const double r_hi = max_range_m(hi, d.path_loss);
  const double r_lo = max_range_m(lo, d.path_loss);
  if (std::abs(r_hi / r_lo - want) > 1e-6) o.fail(fmt("default budget range ratio %.9f", r_hi / r_lo));
  o.note(fmt("range ratio %.10f, area ratio %.10f", ratio, area) +
         fmt(", default budgets %.2f m / %.2f m = %.10f", r_hi, r_lo, r_hi / r_lo));
  return o;
}

// 4: mode ordering of Wi-Fi uplink airtime and downlink goodput.
Outcome mode_ordering() {
  Outcome o;
  std::vector<MetricsReport> r;
  for (Mode m : kAllModes) {
    ScenarioConfig c;
    c.clients = 20;
    c.mode = m;
    c.flow.transport = TransportKind::Reliable;
    c.duration_s = 5.0;
    r.push_back(run_scenario(c));
  }
  const auto& s = r[0];
  const auto& l = r[1];
  const auto& t = r[2];
  const auto& h = r[3];
  if (!(s.wifi_ul_airtime_us > l.wifi_ul_airtime_us && l.wifi_ul_airtime_us > t.wifi_ul_airtime_us &&
        t.wifi_ul_airtime_us > h.wifi_ul_airtime_us)) {
    o.fail("uplink airtime not strictly decreasing standard > loose > tight > hybrid");
  }
  if (h.wifi_ul_airtime_us != 0) o.fail("hybrid uplink airtime is not zero");
  if (!(h.dl_wifi_mbps >= t.dl_wifi_mbps && t.dl_wifi_mbps >= l.dl_wifi_mbps && l.dl_wifi_mbps >= s.dl_wifi_mbps)) {
    o.fail("downlink goodput not ordered hybrid >= tight >= loose >= standard");
  }
  o.note("UL airtime us " + std::to_string(s.wifi_ul_airtime_us) + " > " + std::to_string(l.wifi_ul_airtime_us) + " > " +
         std::to_string(t.wifi_ul_airtime_us) + " > " + std::to_string(h.wifi_ul_airtime_us));
  o.note(fmt("DL Wi-Fi Mbps hybrid %.2f tight %.2f", h.dl_wifi_mbps, t.dl_wifi_mbps) +
         fmt(" loose %.2f standard %.2f", l.dl_wifi_mbps, s.dl_wifi_mbps));
  return o;
}

// 5: range extension by the integrated SSID.
Outcome range_extension() {
  Outcome o;
  auto client_at = [](double d, Mode m, double seconds) {
    ScenarioConfig c;
    c.mode = m;
    c.client_list = {{{d, 0.0}, true}};
    c.flow.direction = FlowDirection::Downlink;
    c.duration_s = seconds;
    return run_scenario(c).stations.at(1);
  };
  const StationReport hy = client_at(40.0, Mode::Hybrid, 2.0);
  const StationReport st = client_at(40.0, Mode::Standard, 2.0);
  if (!hy.associated || hy.dl_wifi_mbps <= 0.0) o.fail("40 m client has no hybrid downlink");
  if (st.associated) o.fail("40 m client associated in standard mode");
  o.note(fmt("40 m: hybrid downlink %.2f Mbps, standard associated=%g", hy.dl_wifi_mbps, st.associated ? 1.0 : 0.0));

  // Largest distance that still associates, by bisection on short runs.
  auto max_distance = [&](Mode m) {
    double lo = 1.0, hi = 200.0;
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      (client_at(mid, m, 0.3).associated ? lo : hi) = mid;
    }
    return lo;
  };
  const double dh = max_distance(Mode::Hybrid);
  const double ds = max_distance(Mode::Standard);
  const double ratio = dh / ds;
  if (std::abs(ratio - 3.162) / 3.162 > 0.02) o.fail(fmt("distance ratio %.4f", ratio));
  o.note(fmt("max association %.3f m vs %.3f m, ratio %.4f (3.162 +/- 2%%)", dh, ds, ratio));
  return o;
}

// 6: no standard client starts a frame inside a CTS-to-Self window, and 33 ms is refused.
Outcome downlink_only_period() {
  Outcome o;
  ScenarioConfig c;
  c.clients = 10;
  c.dl_only_period_us = 100000;
  c.dl_only_window_us = 32000;
  c.duration_s = 2.0;
  std::vector<TraceRecord> tr;
  run_scenario(c, [&](const TraceRecord& t) {
    // MAC notes for frames going on air; tx_end events are excluded.
    static const std::vector<std::string> keep{"tx_data", "tx_mgmt", "tx_transport_ack", "tx_mac_ack", "tx_cts_self",
                                               "nav_cts"};
    if (std::find(keep.begin(), keep.end(), t.name) != keep.end()) tr.push_back(t);
  });
  // A window runs from the end of the CTS for the reserved duration.
  const SimTime cts_us = ref::ofdm_airtime_us(14, c.phy.control_rate_mbps);
  std::vector<std::pair<SimTime, SimTime>> windows;
  int navs = 0;
  for (const TraceRecord& t : tr) {
    if (t.name == "tx_cts_self") windows.emplace_back(t.time + cts_us, t.time + cts_us + c.dl_only_window_us);
    if (t.name == "nav_cts") ++navs;
  }
  int violations = 0;
  int client_starts = 0;
  for (const TraceRecord& t : tr) {
    // A MAC ACK answers the AP's own downlink frame and is not a channel access.
    if (t.station == kApStation || t.name == "nav_cts" || t.name == "tx_mac_ack") continue;
    ++client_starts;
    for (const auto& [a, b] : windows) {
      if (t.time >= a && t.time < b) ++violations;
    }
  }
  if (windows.empty()) o.fail("no CTS-to-Self sent");
  if (violations != 0) o.fail(std::to_string(violations) + " client transmissions inside a window");
  if (navs != static_cast<int>(windows.size()) * c.clients) o.fail("not every client set its NAV");
  const ParseResult bad = parse_scenario("dl_only_period_us: 100000\ndl_only_window_us: 33000\n");
  if (bad.ok()) o.fail("33 ms window accepted");
  o.note(std::to_string(windows.size()) + " windows, " + std::to_string(navs) + " NAV settings, " +
         std::to_string(client_starts) + " client frames, " + std::to_string(violations) + " inside; 33 ms " +
         (bad.ok() ? "accepted" : "rejected"));
  return o;
}

// 7: tunnel conservation and path latency.
Outcome tunnel_conservation() {
  Outcome o;
  auto run = [](TunnelPath p) {
    ScenarioConfig c;
    c.clients = 20;
    c.mode = Mode::Hybrid;
    c.tunnel.path = p;
    c.duration_s = 5.0;
    return run_scenario(c);
  };
  const MetricsReport core = run(TunnelPath::ViaCore);
  const MetricsReport direct = run(TunnelPath::DirectEnbAp);
  for (const MetricsReport* r : {&core, &direct}) {
    if (r->tunnel_sent_bytes <= 0) o.fail("nothing tunnelled");
    if (r->tunnel_ingested_bytes + r->tunnel_in_flight_bytes != r->tunnel_sent_bytes) o.fail("tunnel bytes not conserved");
    if (r->ap_tunnel_delivered_bytes != r->tunnel_ingested_bytes) o.fail("AP ingest differs from tunnel output");
  }
  const ScenarioConfig d;
  const double delta = static_cast<double>(d.tunnel.via_core_latency_us - d.tunnel.direct_latency_us);
  const double fixed_core = core.tunnel_mean_latency_us - core.tunnel_mean_queueing_us;
  const double fixed_direct = direct.tunnel_mean_latency_us - direct.tunnel_mean_queueing_us;
  if (std::abs((fixed_core - fixed_direct) - delta) > 1e-6) o.fail(fmt("path delta %.3f us", fixed_core - fixed_direct));
  if (!(direct.tunnel_mean_latency_us < core.tunnel_mean_latency_us)) o.fail("direct path not faster");
  o.note("sent = ingested + in flight in both runs");
  o.note(fmt("mean latency %.1f us via core, %.1f us direct, path component delta %.1f us", core.tunnel_mean_latency_us,
             direct.tunnel_mean_latency_us, fixed_core - fixed_direct));
  return o;
}

// 8: same scenario and seed give identical CSV, and it matches the committed fixture.
Outcome determinism(const std::string& golden_dir, bool update) {
  Outcome o;
  const ParseResult p = load_scenario_file(golden_dir + "/pinned.yaml");
  if (!p.ok()) {
    o.fail("cannot load " + golden_dir + "/pinned.yaml");
    return o;
  }
  const std::string a = to_csv(run_scenario(*p.config));
  const std::string b = to_csv(run_scenario(*p.config));
  if (a != b) o.fail("two runs differ");
  const std::string path = golden_dir + "/pinned.csv";
  if (update) {
    std::ofstream(path) << a;
    o.note("fixture rewritten");
  }
  std::ifstream in(path);
  std::stringstream golden;
  golden << in.rdbuf();
  if (!in) o.fail("cannot read " + path);
  else if (golden.str() != a) o.fail("output differs from " + path);
  else o.note("byte-identical to " + path);
  return o;
}

// 9: one saturated station against the closed-form cycle.
Outcome single_station() {
  Outcome o;
  const MetricsReport r = run_scenario(saturation_cell(1, 15, 10.0));
  const double want = ref::single_station_mbps(1500, 15);
  const double err = std::abs(r.ul_total_mbps - want) / want;
  if (err > 0.01) o.fail(fmt("off by %.3f%%", 100.0 * err));
  o.note(fmt("simulated %.4f Mbps, closed form %.4f Mbps, error %.3f%% (limit 1%%)", r.ul_total_mbps, want, 100.0 * err));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string golden_dir = HETCELL_GOLDEN_DIR;
  bool update = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--golden-dir" && i + 1 < argc) golden_dir = argv[++i];
    else if (a == "--update-golden") update = true;
    else {
      std::fprintf(stderr, "usage: %s [--golden-dir DIR] [--update-golden]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 oracle-equivalence", oracle_equivalence},
      {"2 throughput-shape", throughput_shape},
      {"3 coverage-arithmetic", coverage_arithmetic},
      {"4 mode-ordering", mode_ordering},
      {"5 range-extension", range_extension},
      {"6 downlink-only-period", downlink_only_period},
      {"7 tunnel-conservation-latency", tunnel_conservation},
      {"8 determinism", [&] { return determinism(golden_dir, update); }},
      {"9 single-station", single_station},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o.fail(std::string("exception: ") + ex.what());
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
