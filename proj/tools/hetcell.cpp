// hetcell: command-line front end for the cell simulator.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hetcell/coverage.hpp"
#include "hetcell/mac.hpp"
#include "hetcell/oracle.hpp"
#include "hetcell/simulation.hpp"
#include "hetcell/sweep.hpp"

namespace {

using namespace hetcell;

int report_errors(const std::vector<std::string>& errors) {
  for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
  return 2;
}

bool parse_n_range(const std::string& s, int& lo, int& hi) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) return false;
  const std::string a = s.substr(0, dots);
  const std::string b = s.substr(dots + 2);
  auto ra = std::from_chars(a.data(), a.data() + a.size(), lo);
  auto rb = std::from_chars(b.data(), b.data() + b.size(), hi);
  return ra.ec == std::errc{} && ra.ptr == a.data() + a.size() && rb.ec == std::errc{} && rb.ptr == b.data() + b.size();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-cell Wi-Fi/LTE integration simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  bool trace = false;
  auto* run = app.add_subcommand("run", "Run one scenario and print its metrics");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--trace", trace, "Print the event trace to stderr");

  std::string sweep_path, axis, values;
  bool serial = false;
  auto* sweep = app.add_subcommand("sweep", "Run one scenario per axis value");
  sweep->add_option("scenario", sweep_path, "Base scenario file")->required();
  sweep->add_option("--axis", axis, "n_clients | cw_min | retry_limit | mode | ul_fraction")->required();
  sweep->add_option("--values", values, "Comma-separated axis values")->required();
  sweep->add_flag("--serial", serial, "Run points one after another on a single thread");

  std::string n_range;
  int cw_min = MacParams{}.cw_min;
  int payload = 1500;
  auto* oracle = app.add_subcommand("oracle", "Analytic saturation throughput table");
  oracle->add_option("--n-range", n_range, "Station counts, a..b")->required();
  oracle->add_option("--cw-min", cw_min, "Minimum contention window (2^k - 1)");
  oracle->add_option("--payload", payload, "Payload bytes per frame");

  std::string budgets_path;
  auto* coverage = app.add_subcommand("coverage", "Range and area table for link budgets");
  coverage->add_option("budgets", budgets_path, "Budgets file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ParseResult parsed = load_scenario_file(scenario_path);
      if (!parsed.ok()) return report_errors(parsed.errors);
      ScenarioConfig cfg = *parsed.config;
      if (seed) cfg.seed = *seed;
      TraceSink sink;
      if (trace) {
        sink = [](const TraceRecord& r) { std::cerr << r.time << " " << r.station << " " << r.name << "\n"; };
      }
      const MetricsReport report = run_scenario(cfg, sink);
      std::cout << (format == "json" ? to_json(report) : to_csv(report));
      return 0;
    }
    if (*sweep) {
      ParseResult parsed = load_scenario_file(sweep_path);
      if (!parsed.ok()) return report_errors(parsed.errors);
      SweepPlanResult planned = plan_sweep(*parsed.config, axis, split_list(values));
      if (!planned.plan) return report_errors(planned.errors);
      const auto reports = serial ? run_batch_serial(planned.plan->points) : run_batch(planned.plan->points);
      std::cout << sweep_csv(*planned.plan, reports);
      return 0;
    }
    if (*oracle) {
      int lo = 0, hi = 0;
      std::vector<std::string> errors;
      if (!parse_n_range(n_range, lo, hi)) errors.push_back("--n-range: expected a..b with integers");
      else if (lo < 1 || hi < lo) errors.push_back("--n-range: need 1 <= a <= b");
      MacParams mac;
      mac.cw_min = cw_min;
      if (!is_pow2_minus_one(cw_min) || cw_min < 1) errors.push_back("--cw-min: must be 2^k - 1");
      else if (cw_min > mac.cw_max) errors.push_back("--cw-min: must not exceed cw_max (1023)");
      if (payload < 0) errors.push_back("--payload: must be >= 0");
      if (!errors.empty()) return report_errors(errors);
      const PhyParams phy;
      std::cout << "n,tau,p,s_mbps\n";
      for (int n = lo; n <= hi; ++n) {
        const ThroughputEstimate e = estimate(bianchi_params(n, mac, phy, payload));
        std::cout << n << "," << fixed(e.tau, 9) << "," << fixed(e.p, 9) << "," << fixed(e.s_mbps, 6) << "\n";
      }
      return 0;
    }
    if (*coverage) {
      std::ifstream in(budgets_path);
      if (!in) return report_errors({budgets_path + ": cannot open file"});
      std::stringstream buf;
      buf << in.rdbuf();
      CoverageInputResult parsed = parse_budgets(buf.str());
      if (!parsed.input) return report_errors(parsed.errors);
      std::cout << coverage_csv(coverage_report(*parsed.input));
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "fatal: " << ex.what() << "\n";
    return 3;
  }
  return 1;
}
