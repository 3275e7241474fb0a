#pragma once

// Run report and its CSV / JSON forms. Column and key order is fixed by the
// schema version, never by the data.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hetcell/integration.hpp"
#include "hetcell/mac.hpp"

namespace hetcell {

inline constexpr int kReportSchemaVersion = 1;

struct StationReport {
  StationId id = kNoStation;
  std::string role;  // ap | client | interferer
  std::string mode;  // standard | loose | tight | hybrid | lte_only, empty for non-clients
  bool associated = false;
  SimTime associated_at_us = -1;
  double distance_m = 0.0;
  double ul_wifi_mbps = 0.0;
  double ul_lte_mbps = 0.0;
  double ul_tunnel_mbps = 0.0;
  double dl_wifi_mbps = 0.0;
  double dl_lte_mbps = 0.0;
  MacCounters mac;
  bool operator==(const StationReport&) const = default;
};

struct MetricsReport {
  std::string mode;
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  int clients = 0;
  int associated = 0;
  int lte_only = 0;

  // goodput: unique payload bytes delivered, per direction per interface
  double ul_wifi_mbps = 0.0;
  double ul_lte_mbps = 0.0;
  double ul_tunnel_mbps = 0.0;
  double dl_wifi_mbps = 0.0;
  double dl_lte_mbps = 0.0;
  double ul_total_mbps = 0.0;
  double dl_total_mbps = 0.0;
  double total_mbps = 0.0;

  // Wi-Fi MAC, summed over stations
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  std::uint64_t collisions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t drops = 0;
  std::uint64_t ack_timeouts = 0;

  // hybrid tunnel-ACK logic at the AP, duplicate suppression at receivers
  std::uint64_t hybrid_retransmissions = 0;
  std::uint64_t late_acks = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t transport_acks = 0;

  // Wi-Fi channel time
  std::array<SimTime, kAirClassCount> airtime_us{};  // over the air, per frame class
  std::array<std::uint64_t, kAirClassCount> frames{};
  SimTime wifi_ul_airtime_us = 0;
  SimTime wifi_dl_airtime_us = 0;
  std::array<SimTime, kAirClassCount> exclusive_us{};
  SimTime overlap_us = 0;
  SimTime idle_us = 0;

  // LTE, bytes include tunnel overhead where applicable
  std::array<std::int64_t, 5> lte_ul_bytes{};  // indexed by TrafficClass
  std::int64_t lte_dl_bytes = 0;
  double lte_ul_utilization = 0.0;
  double lte_dl_utilization = 0.0;
  std::int64_t lte_ul_backlog_bytes = 0;

  std::int64_t tunnel_sent_bytes = 0;
  std::int64_t tunnel_ingested_bytes = 0;
  std::int64_t tunnel_in_flight_bytes = 0;
  std::int64_t ap_tunnel_delivered_bytes = 0;
  double tunnel_mean_latency_us = 0.0;
  double tunnel_mean_queueing_us = 0.0;

  std::vector<StationReport> stations;
  std::string config_yaml;  // echo of the full configuration

  bool operator==(const MetricsReport&) const = default;
};

/// Header line (no trailing newline) for the aggregate CSV. `prefix` columns
/// come first, used by sweeps for the axis name and value.
std::string csv_header(const std::vector<std::string>& prefix = {});
std::string csv_row(const MetricsReport& r, const std::vector<std::string>& prefix = {});
/// Single run: header plus one row.
std::string to_csv(const MetricsReport& r);

std::string to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);

}  // namespace hetcell
