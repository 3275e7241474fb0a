#pragma once

// Link-budget coverage table: per-budget maximum range and pairwise range and
// area ratios.

#include <string>
#include <vector>

#include "hetcell/radio.hpp"

namespace hetcell {

struct NamedBudget {
  std::string name;
  LinkBudget budget;
  bool crosses_wall = false;
  bool operator==(const NamedBudget&) const = default;
};

struct CoverageInput {
  PathLossModel model;
  std::vector<NamedBudget> budgets;
};

struct CoverageInputResult {
  std::optional<CoverageInput> input;
  std::vector<std::string> errors;
};

CoverageInputResult parse_budgets(const std::string& text);

struct RangeRow {
  std::string name;
  double tx_power_dbm = 0.0;
  double max_range_m = 0.0;
};

struct RatioRow {
  std::string high;
  std::string low;
  double range_ratio = 0.0;  // max_range(high) / max_range(low)
  double area_ratio = 0.0;
};

struct CoverageReport {
  std::vector<RangeRow> ranges;
  std::vector<RatioRow> ratios;  // every pair i < j, in input order
};

CoverageReport coverage_report(const CoverageInput& input);
std::string coverage_csv(const CoverageReport& report);

}  // namespace hetcell
