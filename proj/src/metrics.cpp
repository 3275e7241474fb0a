#include "hetcell/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <functional>

namespace hetcell {

namespace {

using Json = nlohmann::ordered_json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

struct Column {
  std::string name;
  std::function<std::string(const MetricsReport&)> value;
};

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = [] {
    std::vector<Column> c;
    auto num = [&c](const char* name, auto get) {
      c.push_back({name, [get](const MetricsReport& r) {
                     const auto v = get(r);
                     if constexpr (std::is_floating_point_v<decltype(v)>) return fixed6(v);
                     else return std::to_string(v);
                   }});
    };
    c.push_back({"mode", [](const MetricsReport& r) { return r.mode; }});
    num("seed", [](const MetricsReport& r) { return r.seed; });
    num("duration_s", [](const MetricsReport& r) { return r.duration_s; });
    num("clients", [](const MetricsReport& r) { return r.clients; });
    num("associated", [](const MetricsReport& r) { return r.associated; });
    num("lte_only", [](const MetricsReport& r) { return r.lte_only; });
    num("ul_wifi_mbps", [](const MetricsReport& r) { return r.ul_wifi_mbps; });
    num("ul_lte_mbps", [](const MetricsReport& r) { return r.ul_lte_mbps; });
    num("ul_tunnel_mbps", [](const MetricsReport& r) { return r.ul_tunnel_mbps; });
    num("dl_wifi_mbps", [](const MetricsReport& r) { return r.dl_wifi_mbps; });
    num("dl_lte_mbps", [](const MetricsReport& r) { return r.dl_lte_mbps; });
    num("ul_total_mbps", [](const MetricsReport& r) { return r.ul_total_mbps; });
    num("dl_total_mbps", [](const MetricsReport& r) { return r.dl_total_mbps; });
    num("total_mbps", [](const MetricsReport& r) { return r.total_mbps; });
    num("attempts", [](const MetricsReport& r) { return r.attempts; });
    num("successes", [](const MetricsReport& r) { return r.successes; });
    num("collisions", [](const MetricsReport& r) { return r.collisions; });
    num("retransmissions", [](const MetricsReport& r) { return r.retransmissions; });
    num("drops", [](const MetricsReport& r) { return r.drops; });
    num("ack_timeouts", [](const MetricsReport& r) { return r.ack_timeouts; });
    num("hybrid_retransmissions", [](const MetricsReport& r) { return r.hybrid_retransmissions; });
    num("late_acks", [](const MetricsReport& r) { return r.late_acks; });
    num("duplicates", [](const MetricsReport& r) { return r.duplicates; });
    num("transport_acks", [](const MetricsReport& r) { return r.transport_acks; });
    for (std::size_t i = 0; i < kAirClassCount; ++i) {
      const std::string cls = to_string(static_cast<AirClass>(i));
      c.push_back({"airtime_" + cls + "_us", [i](const MetricsReport& r) { return std::to_string(r.airtime_us[i]); }});
    }
    for (std::size_t i = 0; i < kAirClassCount; ++i) {
      const std::string cls = to_string(static_cast<AirClass>(i));
      c.push_back({"frames_" + cls, [i](const MetricsReport& r) { return std::to_string(r.frames[i]); }});
    }
    num("wifi_ul_airtime_us", [](const MetricsReport& r) { return r.wifi_ul_airtime_us; });
    num("wifi_dl_airtime_us", [](const MetricsReport& r) { return r.wifi_dl_airtime_us; });
    for (std::size_t i = 0; i < kAirClassCount; ++i) {
      const std::string cls = to_string(static_cast<AirClass>(i));
      c.push_back({"exclusive_" + cls + "_us", [i](const MetricsReport& r) { return std::to_string(r.exclusive_us[i]); }});
    }
    num("overlap_us", [](const MetricsReport& r) { return r.overlap_us; });
    num("idle_us", [](const MetricsReport& r) { return r.idle_us; });
    for (std::size_t i = 0; i < kAllTrafficClasses.size(); ++i) {
      const std::string cls = to_string(kAllTrafficClasses[i]);
      c.push_back({"lte_ul_" + cls + "_bytes", [i](const MetricsReport& r) { return std::to_string(r.lte_ul_bytes[i]); }});
    }
    num("lte_dl_bytes", [](const MetricsReport& r) { return r.lte_dl_bytes; });
    num("lte_ul_utilization", [](const MetricsReport& r) { return r.lte_ul_utilization; });
    num("lte_dl_utilization", [](const MetricsReport& r) { return r.lte_dl_utilization; });
    num("lte_ul_backlog_bytes", [](const MetricsReport& r) { return r.lte_ul_backlog_bytes; });
    num("tunnel_sent_bytes", [](const MetricsReport& r) { return r.tunnel_sent_bytes; });
    num("tunnel_ingested_bytes", [](const MetricsReport& r) { return r.tunnel_ingested_bytes; });
    num("tunnel_in_flight_bytes", [](const MetricsReport& r) { return r.tunnel_in_flight_bytes; });
    num("ap_tunnel_delivered_bytes", [](const MetricsReport& r) { return r.ap_tunnel_delivered_bytes; });
    num("tunnel_mean_latency_us", [](const MetricsReport& r) { return r.tunnel_mean_latency_us; });
    num("tunnel_mean_queueing_us", [](const MetricsReport& r) { return r.tunnel_mean_queueing_us; });
    return c;
  }();
  return cols;
}

template <class T, std::size_t N>
Json array_json(const std::array<T, N>& a) {
  Json j = Json::array();
  for (const T& v : a) j.push_back(v);
  return j;
}

template <class T, std::size_t N>
void array_from(const Json& j, std::array<T, N>& a) {
  for (std::size_t i = 0; i < N; ++i) a[i] = j.at(i).get<T>();
}

}  // namespace

std::string csv_header(const std::vector<std::string>& prefix) {
  std::string out;
  for (const std::string& p : prefix) out += p + ",";
  bool first = true;
  for (const Column& c : columns()) {
    if (!first) out += ",";
    out += c.name;
    first = false;
  }
  return out;
}

std::string csv_row(const MetricsReport& r, const std::vector<std::string>& prefix) {
  std::string out;
  for (const std::string& p : prefix) out += p + ",";
  bool first = true;
  for (const Column& c : columns()) {
    if (!first) out += ",";
    out += c.value(r);
    first = false;
  }
  return out;
}

std::string to_csv(const MetricsReport& r) { return csv_header() + "\n" + csv_row(r) + "\n"; }

std::string to_json(const MetricsReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["duration_s"] = r.duration_s;
  j["clients"] = r.clients;
  j["associated"] = r.associated;
  j["lte_only"] = r.lte_only;
  j["goodput_mbps"] = {{"ul_wifi", r.ul_wifi_mbps}, {"ul_lte", r.ul_lte_mbps},   {"ul_tunnel", r.ul_tunnel_mbps},
                       {"dl_wifi", r.dl_wifi_mbps}, {"dl_lte", r.dl_lte_mbps},   {"ul_total", r.ul_total_mbps},
                       {"dl_total", r.dl_total_mbps}, {"total", r.total_mbps}};
  j["mac"] = {{"attempts", r.attempts},         {"successes", r.successes}, {"collisions", r.collisions},
              {"retransmissions", r.retransmissions}, {"drops", r.drops},         {"ack_timeouts", r.ack_timeouts}};
  j["hybrid"] = {{"retransmissions", r.hybrid_retransmissions}, {"late_acks", r.late_acks}};
  j["duplicates"] = r.duplicates;
  j["transport_acks"] = r.transport_acks;
  Json names = Json::array();
  for (std::size_t i = 0; i < kAirClassCount; ++i) names.push_back(to_string(static_cast<AirClass>(i)));
  j["airtime"] = {{"classes", names},
                  {"ota_us", array_json(r.airtime_us)},
                  {"frames", array_json(r.frames)},
                  {"exclusive_us", array_json(r.exclusive_us)},
                  {"wifi_ul_us", r.wifi_ul_airtime_us},
                  {"wifi_dl_us", r.wifi_dl_airtime_us},
                  {"overlap_us", r.overlap_us},
                  {"idle_us", r.idle_us}};
  j["lte"] = {{"ul_bytes_by_class", array_json(r.lte_ul_bytes)},
              {"dl_bytes", r.lte_dl_bytes},
              {"ul_utilization", r.lte_ul_utilization},
              {"dl_utilization", r.lte_dl_utilization},
              {"ul_backlog_bytes", r.lte_ul_backlog_bytes}};
  j["tunnel"] = {{"sent_bytes", r.tunnel_sent_bytes},
                 {"ingested_bytes", r.tunnel_ingested_bytes},
                 {"in_flight_bytes", r.tunnel_in_flight_bytes},
                 {"ap_delivered_bytes", r.ap_tunnel_delivered_bytes},
                 {"mean_latency_us", r.tunnel_mean_latency_us},
                 {"mean_queueing_us", r.tunnel_mean_queueing_us}};
  Json st = Json::array();
  for (const StationReport& s : r.stations) {
    st.push_back({{"id", s.id},
                  {"role", s.role},
                  {"mode", s.mode},
                  {"associated", s.associated},
                  {"associated_at_us", s.associated_at_us},
                  {"distance_m", s.distance_m},
                  {"ul_wifi_mbps", s.ul_wifi_mbps},
                  {"ul_lte_mbps", s.ul_lte_mbps},
                  {"ul_tunnel_mbps", s.ul_tunnel_mbps},
                  {"dl_wifi_mbps", s.dl_wifi_mbps},
                  {"dl_lte_mbps", s.dl_lte_mbps},
                  {"attempts", s.mac.attempts},
                  {"retransmissions", s.mac.retransmissions},
                  {"successes", s.mac.successes},
                  {"drops", s.mac.drops},
                  {"ack_timeouts", s.mac.ack_timeouts},
                  {"collisions", s.mac.collisions}});
  }
  j["stations"] = st;
  j["config"] = r.config_yaml;
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
    throw std::runtime_error("report_from_json: unsupported schema version");
  }
  MetricsReport r;
  r.mode = j.at("mode").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.duration_s = j.at("duration_s").get<double>();
  r.clients = j.at("clients").get<int>();
  r.associated = j.at("associated").get<int>();
  r.lte_only = j.at("lte_only").get<int>();
  const Json& g = j.at("goodput_mbps");
  r.ul_wifi_mbps = g.at("ul_wifi").get<double>();
  r.ul_lte_mbps = g.at("ul_lte").get<double>();
  r.ul_tunnel_mbps = g.at("ul_tunnel").get<double>();
  r.dl_wifi_mbps = g.at("dl_wifi").get<double>();
  r.dl_lte_mbps = g.at("dl_lte").get<double>();
  r.ul_total_mbps = g.at("ul_total").get<double>();
  r.dl_total_mbps = g.at("dl_total").get<double>();
  r.total_mbps = g.at("total").get<double>();
  const Json& m = j.at("mac");
  r.attempts = m.at("attempts").get<std::uint64_t>();
  r.successes = m.at("successes").get<std::uint64_t>();
  r.collisions = m.at("collisions").get<std::uint64_t>();
  r.retransmissions = m.at("retransmissions").get<std::uint64_t>();
  r.drops = m.at("drops").get<std::uint64_t>();
  r.ack_timeouts = m.at("ack_timeouts").get<std::uint64_t>();
  r.hybrid_retransmissions = j.at("hybrid").at("retransmissions").get<std::uint64_t>();
  r.late_acks = j.at("hybrid").at("late_acks").get<std::uint64_t>();
  r.duplicates = j.at("duplicates").get<std::uint64_t>();
  r.transport_acks = j.at("transport_acks").get<std::uint64_t>();
  const Json& a = j.at("airtime");
  array_from(a.at("ota_us"), r.airtime_us);
  array_from(a.at("frames"), r.frames);
  array_from(a.at("exclusive_us"), r.exclusive_us);
  r.wifi_ul_airtime_us = a.at("wifi_ul_us").get<SimTime>();
  r.wifi_dl_airtime_us = a.at("wifi_dl_us").get<SimTime>();
  r.overlap_us = a.at("overlap_us").get<SimTime>();
  r.idle_us = a.at("idle_us").get<SimTime>();
  const Json& l = j.at("lte");
  array_from(l.at("ul_bytes_by_class"), r.lte_ul_bytes);
  r.lte_dl_bytes = l.at("dl_bytes").get<std::int64_t>();
  r.lte_ul_utilization = l.at("ul_utilization").get<double>();
  r.lte_dl_utilization = l.at("dl_utilization").get<double>();
  r.lte_ul_backlog_bytes = l.at("ul_backlog_bytes").get<std::int64_t>();
  const Json& t = j.at("tunnel");
  r.tunnel_sent_bytes = t.at("sent_bytes").get<std::int64_t>();
  r.tunnel_ingested_bytes = t.at("ingested_bytes").get<std::int64_t>();
  r.tunnel_in_flight_bytes = t.at("in_flight_bytes").get<std::int64_t>();
  r.ap_tunnel_delivered_bytes = t.at("ap_delivered_bytes").get<std::int64_t>();
  r.tunnel_mean_latency_us = t.at("mean_latency_us").get<double>();
  r.tunnel_mean_queueing_us = t.at("mean_queueing_us").get<double>();
  for (const Json& s : j.at("stations")) {
    StationReport x;
    x.id = s.at("id").get<StationId>();
    x.role = s.at("role").get<std::string>();
    x.mode = s.at("mode").get<std::string>();
    x.associated = s.at("associated").get<bool>();
    x.associated_at_us = s.at("associated_at_us").get<SimTime>();
    x.distance_m = s.at("distance_m").get<double>();
    x.ul_wifi_mbps = s.at("ul_wifi_mbps").get<double>();
    x.ul_lte_mbps = s.at("ul_lte_mbps").get<double>();
    x.ul_tunnel_mbps = s.at("ul_tunnel_mbps").get<double>();
    x.dl_wifi_mbps = s.at("dl_wifi_mbps").get<double>();
    x.dl_lte_mbps = s.at("dl_lte_mbps").get<double>();
    x.mac.attempts = s.at("attempts").get<std::uint64_t>();
    x.mac.retransmissions = s.at("retransmissions").get<std::uint64_t>();
    x.mac.successes = s.at("successes").get<std::uint64_t>();
    x.mac.drops = s.at("drops").get<std::uint64_t>();
    x.mac.ack_timeouts = s.at("ack_timeouts").get<std::uint64_t>();
    x.mac.collisions = s.at("collisions").get<std::uint64_t>();
    r.stations.push_back(std::move(x));
  }
  r.config_yaml = j.at("config").get<std::string>();
  return r;
}

}  // namespace hetcell
