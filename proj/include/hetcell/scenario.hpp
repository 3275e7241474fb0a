#pragma once

// Declarative run description and its flat YAML scenario format.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetcell/integration.hpp"
#include "hetcell/lte.hpp"
#include "hetcell/mac.hpp"
#include "hetcell/radio.hpp"
#include "hetcell/traffic.hpp"

namespace hetcell {

struct ClientSpec {
  Position pos;
  bool capable = true;  // understands the integrated SSID
  bool operator==(const ClientSpec&) const = default;
};

struct InterfererSpec {
  SimTime start_us = -1;  // negative: no interferer
  SimTime stop_us = 0;
  Position pos;
  double tx_power_dbm = 20.0;
  SimTime burst_us = 1000;
  SimTime gap_us = 0;
  bool enabled() const { return start_us >= 0; }
  bool operator==(const InterfererSpec&) const = default;
};

struct ScenarioConfig {
  // topology
  int clients = 10;
  double client_radius_m = 5.0;
  std::vector<ClientSpec> client_list;  // overrides clients/client_radius_m when non-empty
  Position ap;
  double ap_standard_ssid_dbm = 16.0;
  double ap_integrated_ssid_dbm = 36.0;
  double client_tx_dbm = 16.0;
  double indoor_radius_m = 0.0;  // 0: everything indoor, no wall crossings
  Mode mode = Mode::Standard;
  bool prefer_integrated = true;

  MacParams mac;
  PhyParams phy;
  PathLossModel path_loss;
  LinkBudget budget;  // receiver side; tx power comes from the fields above
  LteConfig lte;
  TunnelConfig tunnel;
  SimTime hybrid_ack_timeout_us = 0;  // 0: 2 * tunnel latency + 4 ms

  FlowSpec flow;
  AckPolicy ack;
  SubflowPolicy subflow;
  SimTime tight_epoch_us = 10000;

  int mgmt_bytes = 100;
  SimTime mgmt_interval_us = 500000;  // 0 disables periodic management load
  SimTime assoc_retry_us = 100000;

  SimTime dl_only_period_us = 0;  // 0 disables downlink-only periods
  SimTime dl_only_window_us = 0;

  InterfererSpec interferer;

  double duration_s = 10.0;
  std::uint64_t seed = 1;

  SimTime duration_us() const;
  SimTime effective_hybrid_ack_timeout_us() const;
  /// Explicit list, or `clients` evenly spaced on a circle around the AP.
  std::vector<ClientSpec> resolved_clients() const;

  bool operator==(const ScenarioConfig&) const = default;
};

struct ParseResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;  // "field: message"
  bool ok() const { return config.has_value(); }
};

ParseResult parse_scenario(const std::string& text);
ParseResult load_scenario_file(const std::string& path);
/// Every field, explicit, in the scenario format. parse_scenario(to_yaml(c)) == c.
std::string to_yaml(const ScenarioConfig& config);
/// Constraint checks shared by the parser and programmatic callers.
std::vector<std::string> validate(const ScenarioConfig& config);

}  // namespace hetcell
