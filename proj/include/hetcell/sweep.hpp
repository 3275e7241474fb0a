#pragma once

// Parameter sweeps. Points are independent runs: the batch runner spreads
// them over OpenMP threads, the serial runner is the reference it is tested
// against. Output order always follows the input order.

#include <string>
#include <vector>

#include "hetcell/metrics.hpp"
#include "hetcell/scenario.hpp"

namespace hetcell {

enum class SweepAxis { NClients, CwMin, RetryLimit, Mode, UlFraction };
const char* to_string(SweepAxis a);
std::optional<SweepAxis> parse_axis(const std::string& s);

struct SweepPlan {
  SweepAxis axis = SweepAxis::NClients;
  std::vector<std::string> values;
  std::vector<ScenarioConfig> points;  // one per value, seed = base seed + index
};

struct SweepPlanResult {
  std::optional<SweepPlan> plan;
  std::vector<std::string> errors;
};

/// Applies each value to the base configuration through the scenario parser,
/// so a bad value fails with the same message a scenario file would.
SweepPlanResult plan_sweep(const ScenarioConfig& base, const std::string& axis, const std::vector<std::string>& values);

std::vector<MetricsReport> run_batch(const std::vector<ScenarioConfig>& points);
std::vector<MetricsReport> run_batch_serial(const std::vector<ScenarioConfig>& points);

/// Tidy table: axis,value, then the run columns. Header only when empty.
std::string sweep_csv(const SweepPlan& plan, const std::vector<MetricsReport>& reports);

/// Splits "a,b,c" (whitespace around items ignored). Empty input gives no items.
std::vector<std::string> split_list(const std::string& s);

}  // namespace hetcell
