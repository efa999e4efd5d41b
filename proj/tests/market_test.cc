#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "offload/market.h"
#include "offload/rng.h"

namespace offload {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SystemConfig Cfg() {
  SystemConfig cfg;
  cfg.latency_weight = cfg.price_weight = 0.5;
  return cfg;
}

MarketInstance RandomMarket(Rng& rng, int tasks, int servers) {
  MarketInstance in;
  UserEquipment ue;
  ue.local_speed = 1e9;
  in.ues.push_back(ue);
  for (int j = 0; j < servers; ++j) {
    EdgeServer es;
    es.id = j;
    es.capacity = 4;
    es.available = std::uniform_int_distribution<int>(0, 4)(rng);
    es.reserve_price = Uniform(rng, 0.1, 1.0);
    es.speed_per_unit = 1e8 * Uniform(rng, 0.5, 2.0);
    in.servers.push_back(es);
  }
  for (int t = 0; t < tasks; ++t) {
    Task task;
    task.id = t;
    task.len = Uniform(rng, 1e6, 8e6);
    task.complexity = 1000;
    task.deadline = Uniform(rng, 10, 75);
    task.local_time = Uniform(rng, 3, 80);
    in.tasks.push_back(task);
    std::vector<double> rates;
    for (int j = 0; j < servers; ++j)
      rates.push_back(Uniform(rng, 0, 1) < 0.2 ? 0.0 : Uniform(rng, 1e6, 1e7));
    in.rate.push_back(rates);
  }
  return in;
}

// Brute force over every (local | server x grid split) choice per task.
double BruteMinimum(const MarketInstance& in, const SystemConfig& cfg) {
  struct Opt {
    int es;
    int demand;
    double cost;
  };
  std::vector<std::vector<Opt>> opts(in.tasks.size());
  const int steps = static_cast<int>(std::lround(1.0 / cfg.split_step));
  for (std::size_t t = 0; t < in.tasks.size(); ++t) {
    const Task& task = in.tasks[t];
    const double w1 = cfg.latency_weight, w2 = cfg.price_weight;
    const double local = *task.local_time;
    opts[t].push_back({-1, 0, w1 * local});
    for (std::size_t j = 0; j < in.servers.size(); ++j) {
      const double rate = in.rate[t][j];
      if (rate <= 0) continue;
      const EdgeServer& es = in.servers[j];
      const int d = std::clamp(
          static_cast<int>(std::ceil(task.complexity * task.len /
                                     (task.deadline * es.speed_per_unit))),
          1, cfg.demand_max);
      const double off = 2 * task.len / rate +
                         task.complexity * task.len / (d * es.speed_per_unit);
      for (int k = 1; k <= steps; ++k) {
        const double x = double(k) / steps;
        if (std::max(x * off, (1 - x) * local) > task.deadline) continue;
        opts[t].push_back({int(j), d,
                           (1 - x) * w1 * local +
                               x * (w1 * off + w2 * d * es.reserve_price)});
      }
    }
  }
  double best = kInf;
  std::vector<int> room;
  for (const auto& s : in.servers) room.push_back(s.available);
  auto rec = [&](auto&& self, std::size_t t, double acc) -> void {
    if (t == in.tasks.size()) {
      best = std::min(best, acc);
      return;
    }
    for (const Opt& o : opts[t]) {
      if (o.es >= 0 && room[o.es] < o.demand) continue;
      if (o.es >= 0) room[o.es] -= o.demand;
      self(self, t + 1, acc + o.cost);
      if (o.es >= 0) room[o.es] += o.demand;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

void ExpectConstraints(const MarketInstance& in, const Matching& m) {
  std::vector<int> used(in.servers.size(), 0);
  for (std::size_t t = 0; t < in.tasks.size(); ++t) {
    const Assignment& a = m.assignments[t];
    EXPECT_GE(a.split, 0.0);  // local share 1 - split, split in [0, 1]
    EXPECT_LE(a.split, 1.0);
    EXPECT_GE(a.demand_units, 0);
    if (a.es == kLocal) {
      EXPECT_EQ(a.split, 0.0);
      continue;
    }
    used[a.es] += a.demand_units;
    EXPECT_TRUE(a.deadline_met);
    EXPECT_LE(a.latency, in.tasks[t].deadline + 1e-9);
  }
  EXPECT_EQ(used, m.used);
  for (std::size_t j = 0; j < used.size(); ++j)
    EXPECT_LE(used[j], in.servers[j].available);
}

TEST(Demand, MinimumUnitsForTheDeadline) {
  SystemConfig cfg = Cfg();
  EdgeServer es;
  es.speed_per_unit = 1e8;
  Task t{.len = 1e6, .complexity = 1000, .deadline = 4};
  EXPECT_EQ(DemandUnits(t, es, cfg), 3);  // 1e9 cycles / 4e8 per unit
  t.deadline = 100;
  EXPECT_EQ(DemandUnits(t, es, cfg), 1);
  t.deadline = 0.1;
  EXPECT_EQ(DemandUnits(t, es, cfg), cfg.demand_max);
  t.demand_cap = 2;
  EXPECT_EQ(DemandUnits(t, es, cfg), 2);
}

TEST(Cost, Examples) {
  SystemConfig cfg = Cfg();
  EXPECT_DOUBLE_EQ(TotalCost(0, 7, 3, 2, 1, cfg), 0.5 * 7);
  EXPECT_DOUBLE_EQ(TotalCost(1, 7, 2, 1, 0.5, cfg), 1.25);
  cfg.latency_weight = 1;
  cfg.price_weight = 0;
  EXPECT_DOUBLE_EQ(TotalCost(0.6, 7, 2, 3, 0.5, cfg),
                   TotalCost(0.6, 7, 2, 3, 900, cfg));
}

TEST(SplitRangeTest, Examples) {
  SystemConfig cfg = Cfg();
  UserEquipment ue;
  EdgeServer es;
  es.speed_per_unit = 5e8;
  Task t{.len = 1e6, .complexity = 1000, .deadline = kInf};
  t.local_time = 5.0;
  auto r = FeasibleSplitRange(t, ue, es, 1, 1e6, cfg);
  EXPECT_FALSE(r.empty);
  EXPECT_EQ(r.lo, 0.0);
  EXPECT_EQ(r.hi, 1.0);

  // Offloading the whole task takes 2 s on the link plus 2 s of compute.
  t.deadline = 2;
  t.local_time = 0.0;
  r = FeasibleSplitRange(t, ue, es, 1, 1e6, cfg);
  EXPECT_DOUBLE_EQ(r.hi, 0.5);
  EXPECT_EQ(r.lo, 0.0);

  t.deadline = 4;
  t.local_time = 3.0;
  r = FeasibleSplitRange(t, ue, es, 1, 1e6, cfg);
  EXPECT_EQ(r.lo, 0.0);
  EXPECT_EQ(r.hi, 1.0);

  r = FeasibleSplitRange(t, ue, es, 1, 0.0, cfg);
  EXPECT_EQ(r.hi, 0.0);
  EXPECT_FALSE(r.empty);
}

TEST(SplitGridTest, IntersectsRange) {
  EXPECT_EQ(SplitGrid({0, 1, false}, 0.25),
            (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(SplitGrid({0.3, 0.6, false}, 0.25), (std::vector<double>{0.5}));
  EXPECT_TRUE(SplitGrid({0, 1, true}, 0.25).empty());
}

TEST(Matching, DominantOffload) {
  SystemConfig cfg = Cfg();
  MarketInstance in;
  in.ues.push_back({});
  EdgeServer es;
  es.capacity = es.available = 8;
  es.reserve_price = 0.1;
  es.speed_per_unit = 1e9;
  in.servers.push_back(es);
  Task t{.len = 1e6, .complexity = 1000, .deadline = 50};
  t.local_time = 40.0;
  in.tasks.push_back(t);
  in.rate = {{1e7}};
  const Matching m = MatchDemandSupply(in, cfg);
  EXPECT_EQ(m.assignments[0].es, 0);
  EXPECT_EQ(m.assignments[0].split, 1.0);
  EXPECT_EQ(m.used[0], m.assignments[0].demand_units);
}

TEST(Matching, NoSupplyKeepsEverythingLocal) {
  SystemConfig cfg = Cfg();
  Rng rng = MakeRng(3, 0);
  MarketInstance in = RandomMarket(rng, 4, 2);
  for (auto& s : in.servers) s.available = 0;
  const Matching m = MatchDemandSupply(in, cfg);
  double expected = 0;
  for (const auto& t : in.tasks) expected += cfg.latency_weight * *t.local_time;
  for (const auto& a : m.assignments) EXPECT_EQ(a.es, kLocal);
  EXPECT_NEAR(m.objective, expected, 1e-9);
}

TEST(Matching, ExactEqualsEnumeration) {
  SystemConfig cfg = Cfg();
  cfg.split_step = 0.25;
  for (int s = 0; s < 200; ++s) {
    Rng rng = MakeRng(s, 7);
    const MarketInstance in = RandomMarket(rng, 3, 2);
    const Matching m = MatchDemandSupply(in, cfg);
    EXPECT_NEAR(m.objective, BruteMinimum(in, cfg), 1e-9) << "seed " << s;
    ExpectConstraints(in, m);
  }
}

TEST(Matching, GreedyIsBoundedAndLocallyStable) {
  SystemConfig cfg = Cfg();
  cfg.split_step = 0.25;
  for (int s = 0; s < 100; ++s) {
    Rng rng = MakeRng(s, 8);
    MarketInstance in = RandomMarket(rng, 6, 3);
    const Matching exact = MatchDemandSupply(in, cfg);
    const Matching greedy = MatchDemandSupply(in, cfg, SolverMode::kGreedy);
    ExpectConstraints(in, greedy);
    EXPECT_GE(greedy.objective, exact.objective - 1e-9);
    // Moving any one task to a cheaper option would break capacity.
    for (std::size_t t = 0; t < in.tasks.size(); ++t) {
      MarketInstance solo = in;
      solo.tasks = {in.tasks[t]};
      solo.rate = {in.rate[t]};
      for (std::size_t j = 0; j < in.servers.size(); ++j) {
        int others = greedy.used[j];
        if (greedy.assignments[t].es == int(j))
          others -= greedy.assignments[t].demand_units;
        solo.servers[j].available = in.servers[j].available - others;
      }
      const Matching alone = MatchDemandSupply(solo, cfg);
      EXPECT_GE(alone.objective, greedy.assignments[t].cost - 1e-9);
    }
  }
}

TEST(Matching, ZeroPriceWeightIgnoresPrices) {
  SystemConfig cfg = Cfg();
  cfg.latency_weight = 1;
  cfg.price_weight = 0;
  for (int s = 0; s < 30; ++s) {
    Rng rng = MakeRng(s, 9);
    MarketInstance in = RandomMarket(rng, 3, 2);
    const Matching a = MatchDemandSupply(in, cfg);
    for (auto& es : in.servers) es.reserve_price *= 37;
    const Matching b = MatchDemandSupply(in, cfg);
    EXPECT_DOUBLE_EQ(a.objective, b.objective);
    for (std::size_t t = 0; t < in.tasks.size(); ++t) {
      EXPECT_EQ(a.assignments[t].es, b.assignments[t].es);
      EXPECT_EQ(a.assignments[t].split, b.assignments[t].split);
    }
  }
}

TEST(Balance, Examples) {
  std::vector<EdgeServer> servers(1);
  servers[0].capacity = servers[0].available = 10;
  Matching m;
  m.used = {10};
  auto b = MarketBalanceReport(m, servers);
  EXPECT_EQ(b.oversupply, 0);
  EXPECT_EQ(b.unmet_demand, 0);
  m.used = {7};
  EXPECT_EQ(MarketBalanceReport(m, servers).oversupply, 3);
}

TEST(Balance, MatchesRecount) {
  SystemConfig cfg = Cfg();
  for (int s = 0; s < 50; ++s) {
    Rng rng = MakeRng(s, 10);
    const MarketInstance in = RandomMarket(rng, 8, 3);
    const Matching m = MatchDemandSupply(in, cfg, SolverMode::kGreedy);
    const MarketBalance b = MarketBalanceReport(m, in.servers);
    int supply = 0, used = 0, blocked = 0;
    for (const auto& es : in.servers) supply += es.available;
    for (const auto& a : m.assignments) {
      if (a.es != kLocal) used += a.demand_units;
      blocked += a.blocked_demand;
    }
    EXPECT_GE(b.oversupply, 0);
    EXPECT_GE(b.unmet_demand, 0);
    EXPECT_EQ(b.oversupply, supply - used);
    EXPECT_EQ(b.unmet_demand, blocked);
  }
}

TEST(Export, MatchingCsv) {
  Matching m;
  m.assignments = {{.task_id = 4, .es = kLocal, .cost = 1.5},
                   {.task_id = 5, .es = 1, .split = 0.5, .demand_units = 2,
                    .cost = 2}};
  std::ostringstream out;
  WriteMatchingCsv(m, out);
  EXPECT_EQ(out.str(),
            "task_id,es_id_or_local,split,demand_units,cost_component\n"
            "4,local,0,0,1.5\n5,1,0.5,2,2\n");
}

}  // namespace
}  // namespace offload
