#include "hetcell/sweep.hpp"

#include <yaml-cpp/yaml.h>

#include <exception>
#include <stdexcept>

#include "hetcell/simulation.hpp"

namespace hetcell {

namespace {

struct AxisInfo {
  SweepAxis axis;
  const char* name;
  const char* key;  // scenario key the value is written to
};

constexpr AxisInfo kAxes[] = {
    {SweepAxis::NClients, "n_clients", "clients"},
    {SweepAxis::CwMin, "cw_min", "cw_min"},
    {SweepAxis::RetryLimit, "retry_limit", "retry_limit"},
    {SweepAxis::Mode, "mode", "mode"},
    {SweepAxis::UlFraction, "ul_fraction", "lte_ul_fraction"},
};

const AxisInfo& info(SweepAxis a) {
  for (const AxisInfo& i : kAxes) {
    if (i.axis == a) return i;
  }
  throw std::logic_error("unknown sweep axis");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

const char* to_string(SweepAxis a) { return info(a).name; }

std::optional<SweepAxis> parse_axis(const std::string& s) {
  for (const AxisInfo& i : kAxes) {
    if (s == i.name) return i.axis;
  }
  return std::nullopt;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

SweepPlanResult plan_sweep(const ScenarioConfig& base, const std::string& axis_name,
                           const std::vector<std::string>& values) {
  SweepPlanResult result;
  const auto axis = parse_axis(axis_name);
  if (!axis) {
    std::string names;
    for (const AxisInfo& i : kAxes) names += (names.empty() ? "" : "|") + std::string(i.name);
    result.errors.push_back("--axis: unknown axis \"" + axis_name + "\" (expected " + names + ")");
    return result;
  }
  if (*axis == SweepAxis::NClients && !base.client_list.empty()) {
    result.errors.push_back("--axis: n_clients cannot be swept when the scenario has an explicit client_list");
    return result;
  }
  SweepPlan plan;
  plan.axis = *axis;
  plan.values = values;
  const std::string key = info(*axis).key;
  for (std::size_t i = 0; i < values.size(); ++i) {
    YAML::Node doc = YAML::Load(to_yaml(base));
    doc[key] = values[i];
    doc["seed"] = base.seed + i;
    YAML::Emitter out;
    out << doc;
    ParseResult parsed = parse_scenario(out.c_str());
    if (!parsed.ok()) {
      for (const std::string& e : parsed.errors) result.errors.push_back("value \"" + values[i] + "\": " + e);
      continue;
    }
    plan.points.push_back(*parsed.config);
  }
  if (result.errors.empty()) result.plan = std::move(plan);
  return result;
}

std::vector<MetricsReport> run_batch_serial(const std::vector<ScenarioConfig>& points) {
  std::vector<MetricsReport> out;
  out.reserve(points.size());
  for (const ScenarioConfig& c : points) out.push_back(run_scenario(c));
  return out;
}

std::vector<MetricsReport> run_batch(const std::vector<ScenarioConfig>& points) {
  std::vector<MetricsReport> out(points.size());
  std::vector<std::exception_ptr> failures(points.size());
  const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = run_scenario(points[k]);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

std::string sweep_csv(const SweepPlan& plan, const std::vector<MetricsReport>& reports) {
  if (reports.size() != plan.points.size()) throw std::invalid_argument("sweep_csv: report count mismatch");
  std::string out = csv_header({"axis", "value"}) + "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out += csv_row(reports[i], {to_string(plan.axis), plan.values[i]}) + "\n";
  }
  return out;
}

}  // namespace hetcell
