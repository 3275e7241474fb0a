#include <doctest.h>

#include <string>
#include <vector>

#include "hetcell/simulation.hpp"
#include "hetcell/sweep.hpp"
#include "support.hpp"

using namespace hetcell;

TEST_CASE("list splitting") {
  CHECK(split_list("1, 5 ,10") == std::vector<std::string>{"1", "5", "10"});
  CHECK(split_list("").empty());
  CHECK(split_list("x") == std::vector<std::string>{"x"});
}

TEST_CASE("plan applies each value and offsets the seed") {
  ScenarioConfig base = testcfg::cell(5, Mode::Standard, 0.1);
  base.seed = 40;
  const SweepPlanResult r = plan_sweep(base, "n_clients", {"1", "2", "8"});
  REQUIRE(r.plan.has_value());
  REQUIRE(r.plan->points.size() == 3);
  CHECK(r.plan->points[0].clients == 1);
  CHECK(r.plan->points[2].clients == 8);
  CHECK(r.plan->points[2].seed == 42);
  const SweepPlanResult modes = plan_sweep(base, "mode", {"standard", "hybrid"});
  REQUIRE(modes.plan.has_value());
  CHECK(modes.plan->points[1].mode == Mode::Hybrid);
}

TEST_CASE("bad axis and bad values are errors") {
  const ScenarioConfig base;
  CHECK_FALSE(plan_sweep(base, "colour", {"1"}).plan.has_value());
  const SweepPlanResult bad = plan_sweep(base, "cw_min", {"15", "14"});
  CHECK_FALSE(bad.plan.has_value());
  REQUIRE_FALSE(bad.errors.empty());
  CHECK(bad.errors.front().find("cw_min") != std::string::npos);
  CHECK_FALSE(plan_sweep(base, "ul_fraction", {"2"}).plan.has_value());
}

TEST_CASE("parallel batch equals the serial reference, in input order") {
  ScenarioConfig base = testcfg::cell(3, Mode::Tight, 0.1);
  const SweepPlanResult r = plan_sweep(base, "n_clients", {"1", "2", "3", "4", "5", "6"});
  REQUIRE(r.plan.has_value());
  const auto par = run_batch(r.plan->points);
  const auto ser = run_batch_serial(r.plan->points);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i] == ser[i]);
    CHECK(par[i].clients == static_cast<int>(i) + 1);
  }
  CHECK(sweep_csv(*r.plan, par) == sweep_csv(*r.plan, ser));
}

TEST_CASE("empty sweep prints just the header") {
  SweepPlan plan;
  const std::string csv = sweep_csv(plan, {});
  CHECK(csv == csv_header({"axis", "value"}) + "\n");
  CHECK(run_batch({}).empty());
}
