#include "hetcell/coverage.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace hetcell {

namespace {

bool read_double(const YAML::Node& n, double& out) { return n.IsScalar() && YAML::convert<double>::decode(n, out); }

std::string num(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

CoverageInputResult parse_budgets(const std::string& text) {
  CoverageInputResult result;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    result.errors.push_back(std::string("<document>: ") + ex.what());
    return result;
  }
  if (!root.IsMap()) {
    result.errors.push_back("<document>: expected a mapping with a budgets list");
    return result;
  }
  CoverageInput in;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    bool ok = true;
    if (key == "path_loss_exponent") ok = read_double(v, in.model.exponent);
    else if (key == "reference_loss_db") ok = read_double(v, in.model.reference_loss_db);
    else if (key == "reference_distance_m") ok = read_double(v, in.model.reference_distance_m);
    else if (key == "wall_penetration_db") ok = read_double(v, in.model.wall_penetration_db);
    else if (key == "budgets") {
      if (!v.IsSequence()) {
        result.errors.push_back("budgets: expected a list");
        continue;
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string where = "budgets[" + std::to_string(i) + "]";
        const YAML::Node& e = v[i];
        if (!e.IsMap()) {
          result.errors.push_back(where + ": expected a map");
          continue;
        }
        NamedBudget b;
        b.name = "budget" + std::to_string(i);
        for (const auto& f : e) {
          const std::string k = f.first.as<std::string>();
          bool fok = true;
          if (k == "name") {
            fok = f.second.IsScalar();
            if (fok) b.name = f.second.Scalar();
          } else if (k == "tx_power_dbm") fok = read_double(f.second, b.budget.tx_power_dbm);
          else if (k == "sensitivity_dbm") fok = read_double(f.second, b.budget.sensitivity_dbm);
          else if (k == "noise_floor_dbm") fok = read_double(f.second, b.budget.noise_floor_dbm);
          else if (k == "capture_threshold_db") fok = read_double(f.second, b.budget.capture_threshold_db);
          else if (k == "crosses_wall") fok = f.second.IsScalar() && YAML::convert<bool>::decode(f.second, b.crosses_wall);
          else {
            result.errors.push_back(where + "." + k + ": unknown key");
            continue;
          }
          if (!fok) result.errors.push_back(where + "." + k + ": bad value");
        }
        if (!(b.budget.sensitivity_dbm > b.budget.noise_floor_dbm)) {
          result.errors.push_back(where + ".sensitivity_dbm: must exceed noise_floor_dbm");
        }
        in.budgets.push_back(b);
      }
      continue;
    } else {
      result.errors.push_back(key + ": unknown key");
      continue;
    }
    if (!ok) result.errors.push_back(key + ": expected number");
  }
  if (!(in.model.exponent > 0.0)) result.errors.push_back("path_loss_exponent: must be positive");
  if (!(in.model.reference_loss_db >= 0.0)) result.errors.push_back("reference_loss_db: must be >= 0");
  if (!(in.model.reference_distance_m > 0.0)) result.errors.push_back("reference_distance_m: must be positive");
  if (!(in.model.wall_penetration_db >= 0.0)) result.errors.push_back("wall_penetration_db: must be >= 0");
  if (in.budgets.empty()) result.errors.push_back("budgets: at least one budget is required");
  std::set<std::string> names;
  for (const NamedBudget& b : in.budgets) {
    if (!names.insert(b.name).second) result.errors.push_back("budgets: duplicate name \"" + b.name + "\"");
  }
  if (result.errors.empty()) result.input = std::move(in);
  return result;
}

CoverageReport coverage_report(const CoverageInput& input) {
  CoverageReport r;
  for (const NamedBudget& b : input.budgets) {
    r.ranges.push_back({b.name, b.budget.tx_power_dbm, max_range_m(b.budget, input.model, b.crosses_wall)});
  }
  for (std::size_t i = 0; i < r.ranges.size(); ++i) {
    for (std::size_t j = i + 1; j < r.ranges.size(); ++j) {
      const double a = r.ranges[i].max_range_m;
      const double b = r.ranges[j].max_range_m;
      double ratio = 0.0;
      if (b > 0.0) ratio = a / b;
      else if (a > 0.0) ratio = std::numeric_limits<double>::infinity();
      r.ratios.push_back({r.ranges[i].name, r.ranges[j].name, ratio, ratio * ratio});
    }
  }
  return r;
}

std::string coverage_csv(const CoverageReport& report) {
  std::string out = "kind,budget,reference,tx_power_dbm,max_range_m,range_ratio,area_ratio\n";
  for (const RangeRow& row : report.ranges) {
    out += "range," + row.name + ",," + num(row.tx_power_dbm) + "," + num(row.max_range_m) + ",,\n";
  }
  for (const RatioRow& row : report.ratios) {
    out += "ratio," + row.high + "," + row.low + ",,," + num(row.range_ratio) + "," + num(row.area_ratio) + "\n";
  }
  return out;
}

}  // namespace hetcell
