#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "offload/harness.h"

namespace offload {
namespace {

int CountLines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

TEST(Csv, EmptyRowsGiveHeaderOnly) {
  std::ostringstream out;
  EmitCsv({}, out);
  EXPECT_EQ(out.str(), std::string(kMetricsHeader) + "\n");
}

TEST(Csv, OneRowRoundTrips) {
  MetricsRow row;
  row.scenario = "pipeline";
  row.method = "auction";
  row.seed = 3;
  row.num_tasks = 1000;
  row.social_welfare = 12345.678;
  row.success_rate = 0.25;
  std::ostringstream out;
  EmitCsv(std::vector<MetricsRow>{row}, out);
  EXPECT_EQ(CountLines(out.str()), 2);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 16u);
  EXPECT_EQ(cells[0], "pipeline");
  EXPECT_EQ(cells[1], "auction");
  EXPECT_EQ(cells[4], "3");
  EXPECT_EQ(cells[5], "1000");
  EXPECT_DOUBLE_EQ(std::stod(cells[7]), 12345.678);
  EXPECT_DOUBLE_EQ(std::stod(cells[8]), 0.25);
}

TEST(Csv, UnwritablePathThrows) {
  EXPECT_THROW(EmitCsv({}, std::string("/nonexistent-dir/x.csv")),
               std::runtime_error);
}

TEST(Success, Examples) {
  std::vector<TaskOutcome> all(4);
  for (auto& o : all) o.allocated = o.deadline_met = true;
  EXPECT_EQ(SuccessRate(all, false), 1.0);
  std::vector<TaskOutcome> none(4);
  for (auto& o : none) o.local_meets_deadline = true;
  EXPECT_EQ(SuccessRate(none, false), 0.0);
  EXPECT_EQ(SuccessRate(none, true), 1.0);
  all[0].deadline_met = false;
  EXPECT_EQ(SuccessRate(all, false), 0.75);
  EXPECT_EQ(SuccessRate({}, false), 0.0);
}

TEST(Pipeline, ZeroCapacityAllocatesNothing) {
  SystemConfig cfg;
  cfg.num_tasks = 200;
  cfg.es_capacity = 0;
  const PipelineResult r = RunPipeline(cfg, 1, Allocator::kAuction);
  EXPECT_EQ(SuccessRate(r.tasks, false), 0.0);
  for (const auto& t : r.tasks) EXPECT_FALSE(t.allocated);
}

TEST(Pipeline, OutcomesAreConsistent) {
  SystemConfig cfg;
  cfg.num_tasks = 400;
  for (auto alloc : {Allocator::kAuction, Allocator::kLowestPrice}) {
    const PipelineResult r = RunPipeline(cfg, 2, alloc);
    ASSERT_EQ(r.tasks.size(), GenerateWorkload(cfg, 2, r.num_ues).tasks.size());
    const double rate = SuccessRate(r.tasks, false);
    EXPECT_GE(rate, 0.0);
    EXPECT_LE(rate, 1.0);
    EXPECT_GT(rate, 0.0);
    EXPECT_GE(r.balance.oversupply, 0);
    EXPECT_GE(r.balance.unmet_demand, 0);
    for (const auto& t : r.tasks) {
      if (!t.allocated) continue;
      EXPECT_TRUE(t.offloadable);
      EXPECT_GE(t.es, 0);
      EXPECT_GT(t.split, 0.0);
      EXPECT_LE(t.split, 1.0);
      EXPECT_GE(t.payment, 0.0);
    }
  }
}

TEST(Pipeline, Deterministic) {
  SystemConfig cfg;
  cfg.num_tasks = 300;
  const auto a = PipelineRows("pipeline", cfg, 4, false);
  const auto b = PipelineRows("pipeline", cfg, 4, false);
  std::ostringstream sa, sb;
  EmitCsv(a, sa);
  EmitCsv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  for (const auto& row : a) EXPECT_EQ(row.runtime_ms, 0.0);
}

TEST(Scenarios, RegistryCoversEveryExperiment) {
  const auto names = ScenarioNames();
  for (const char* n :
       {"welfare_vs_tasks", "welfare_vs_ues", "truthfulness", "rationality",
        "success_rate", "runtime", "convergence", "pipeline"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST(Scenarios, UnknownNameListsRegistered) {
  ScenarioContext ctx;
  ctx.seeds = {1};
  try {
    RunScenario("no_such_figure", ctx);
    FAIL();
  } catch (const UnknownScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("welfare_vs_tasks"), std::string::npos);
  }
}

TEST(Scenarios, EmptySeedListGivesNoRows) {
  ScenarioContext ctx;
  for (const auto& name : ScenarioNames())
    EXPECT_TRUE(RunScenario(name, ctx).empty()) << name;
}

TEST(Scenarios, TruthfulnessCurveIsFlatForWinningOverbids) {
  ScenarioContext ctx;
  ctx.seeds = {1};
  const auto rows = RunScenario("truthfulness", ctx);
  ASSERT_FALSE(rows.empty());
  double at_truth = 0;
  bool seen = false;
  for (const auto& r : rows) {
    EXPECT_EQ(r.scenario, "truthfulness");
    if (r.param_value == 150) {
      at_truth = r.payoff;
      seen = true;
    }
  }
  ASSERT_TRUE(seen);
  EXPECT_GT(at_truth, 0.0);
  for (const auto& r : rows) {
    if (r.param_value >= 150) {
      EXPECT_EQ(r.payoff, at_truth) << r.param_value;
    }
    EXPECT_LE(r.payoff, at_truth);
  }
}

TEST(Reference, StateHasAggregatedBids) {
  const EquilibriumState s = BuildEquilibriumState(ReferenceConfig(), 1);
  EXPECT_EQ(s.instance.asks.size(), 6u);
  EXPECT_GT(s.instance.bids.size(), 20u);
  EXPECT_LE(s.instance.bids.size(), 115u);
  for (const auto& b : s.instance.bids) {
    EXPECT_EQ(b.valuation, s.grid.valuations.front());
    EXPECT_GE(b.demand, 1);
    EXPECT_LE(b.demand, 4);
  }
  const RoundResult r = RunAuctionRound(s, ReferenceConfig());
  EXPECT_FALSE(r.outcome.Winners().empty());
}

TEST(Random, InstancesRespectTheSpec) {
  Rng rng = MakeRng(51, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 6;
  for (int n = 0; n < 200; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    EXPECT_GE(in.bids.size(), 1u);
    EXPECT_LE(in.bids.size(), 6u);
    EXPECT_LE(in.asks.size(), 2u);
    for (const auto& a : in.asks) EXPECT_LE(a.available, 3);
    for (const auto& b : in.bids) {
      EXPECT_EQ(std::fmod(b.valuation, 10.0), 0.0);
      EXPECT_LE(b.valuation, 100.0);
      EXPECT_LE(b.demand, 2);
    }
  }
}

TEST(Complexity, FitRecoversExactCurve) {
  const std::vector<double> k = {25, 50, 100, 200};
  std::vector<double> t;
  for (double x : k) t.push_back(3e-9 * x * x * std::log(x));
  const auto fit = FitQuadraticLog(k, t);
  EXPECT_NEAR(fit.scale, 3e-9, 1e-18);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  const std::vector<double> flat = {1, 1, 1, 1};
  EXPECT_LT(FitQuadraticLog(k, flat).r_squared, 0.9);
  const std::vector<double> falling = {4, 3, 2, 1};
  EXPECT_LT(FitQuadraticLog(k, falling).r_squared, 0.0);
}

}  // namespace
}  // namespace offload
