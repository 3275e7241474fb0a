#pragma once

// One run of a single Wi-Fi/LTE cell: station 0 is the AP, clients follow in
// configuration order, and an optional interferer comes last.

#include "hetcell/metrics.hpp"
#include "hetcell/scenario.hpp"

namespace hetcell {

inline constexpr StationId kApStation = 0;

/// Runs a validated configuration to completion. `trace`, when set, receives
/// every fired event and MAC transmission note in order.
MetricsReport run_scenario(const ScenarioConfig& config, const TraceSink& trace = {});

}  // namespace hetcell
