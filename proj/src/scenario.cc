#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <queue>

#include "offload/harness.h"
#include "offload/rng.h"

namespace offload {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

using RateMatrix = std::vector<std::vector<double>>;

void FillRates(const Topology& topo, const SystemConfig& cfg, std::size_t ue,
               RateMatrix& r) {
  for (std::size_t j = 0; j < topo.servers.size(); ++j)
    r[ue][j] = topo.Covers(static_cast<int>(j), static_cast<int>(ue))
                   ? TransmissionRate(static_cast<int>(ue),
                                      static_cast<int>(j), topo, cfg)
                   : 0.0;
}

RateMatrix ComputeRates(const Topology& topo, const SystemConfig& cfg) {
  RateMatrix r(topo.ues.size(), std::vector<double>(topo.servers.size(), 0.0));
  for (std::size_t i = 0; i < topo.ues.size(); ++i) FillRates(topo, cfg, i, r);
  return r;
}

struct TaskPlan {
  bool offloadable = false;
  double split = 0.0;
  int demand = 0;
  std::vector<double> latency;  // per server, infinite when not linked
};

// Cost-minimizing feasible split at the nearest covering server, and the
// latency every covering server would give at that split.
TaskPlan PlanTask(const Task& task, const Topology& topo, const RateMatrix& rates,
                  const SystemConfig& cfg, int demand_override = 0) {
  TaskPlan plan;
  plan.latency.assign(topo.servers.size(), kInf);
  const int owner = task.owner_ue;
  const int home = topo.ServingServer(owner);
  if (home < 0 || !(rates[owner][home] > 0)) return plan;
  const UserEquipment& ue = topo.ues[owner];
  const EdgeServer& es = topo.servers[home];
  plan.demand = demand_override > 0 ? demand_override
                                    : DemandUnits(task, es, cfg);
  const double rate = rates[owner][home];
  const auto grid = SplitGrid(
      FeasibleSplitRange(task, ue, es, plan.demand, rate, cfg), cfg.split_step);
  if (grid.empty()) return plan;
  double best = kInf;
  for (double x : grid) {
    const double c = TotalCost(task, ue, es, x, plan.demand, rate, cfg);
    if (c < best) {
      best = c;
      plan.split = x;
    }
  }
  Task t = task;
  t.split = plan.split;
  for (std::size_t j = 0; j < topo.servers.size(); ++j) {
    if (!(rates[owner][j] > 0)) continue;
    const double l = ComputeLatency(t, ue, topo.servers[j], plan.demand,
                                    rates[owner][j], cfg)
                         .total;
    if (l <= task.deadline + kTol) plan.latency[j] = l;
  }
  plan.offloadable = plan.latency[home] < kInf;
  return plan;
}

double LocalLatency(const Task& task, const Topology& topo) {
  return LocalProcessingTime(0.0, task, topo.ues[task.owner_ue]);
}

struct Payoffs {
  double welfare = 0.0;
  double cost = 0.0;
};

Payoffs Score(const AuctionInstance& in, const AuctionOutcome& out,
              const SystemConfig& cfg) {
  std::vector<double> buyers(in.bids.size()), sellers(in.asks.size());
  Payoffs p;
  for (std::size_t i = 0; i < in.bids.size(); ++i) {
    buyers[i] = BuyerPayoff(in, out, i, in.bids[i].valuation, cfg);
    if (out.IsWinner(i))
      p.cost += cfg.latency_weight * in.Latency(i, out.allocation.server[i]) +
                cfg.price_weight * out.payments[i];
  }
  for (std::size_t j = 0; j < in.asks.size(); ++j)
    sellers[j] = SellerPayoff(in, out, j, cfg);
  p.welfare = SocialWelfare(buyers, sellers);
  return p;
}

// First come first served, each bid to its cheapest linked server with room,
// paying the reserve price.
AuctionOutcome LowestPriceGreedy(const AuctionInstance& in) {
  AuctionOutcome out;
  out.allocation.server.assign(in.bids.size(), kUnassigned);
  out.payments.assign(in.bids.size(), 0.0);
  out.units_sold.assign(in.asks.size(), 0);
  for (std::size_t i = 0; i < in.bids.size(); ++i) {
    int pick = kUnassigned;
    for (std::size_t j = 0; j < in.asks.size(); ++j) {
      if (!in.Eligible(i, j) ||
          in.asks[j].available - out.units_sold[j] < in.bids[i].demand)
        continue;
      if (pick == kUnassigned ||
          in.asks[j].reserve_price < in.asks[pick].reserve_price)
        pick = static_cast<int>(j);
    }
    if (pick == kUnassigned) continue;
    out.allocation.server[i] = pick;
    out.units_sold[pick] += in.bids[i].demand;
    out.payments[i] = in.bids[i].demand * in.asks[pick].reserve_price;
    out.allocation.welfare += in.bids[i].demand * in.bids[i].valuation;
  }
  out.declared_welfare = out.allocation.welfare;
  out.incomes = SellerIncome(in, out);
  return out;
}

struct Release {
  double time;
  int es;
  int units;
  int ue;
  bool operator>(const Release& o) const {
    if (time != o.time) return time > o.time;
    return es != o.es ? es > o.es : ue > o.ue;
  }
};

}  // namespace

PipelineResult RunPipeline(const SystemConfig& cfg, std::uint64_t /*seed*/,
                           Allocator allocator, const Workload& workload,
                           const Topology& topology) {
  // Only UEs with a task in the current batch or data in flight interfere.
  Topology topo = topology;
  RateMatrix rates(topo.ues.size(),
                   std::vector<double>(topo.servers.size(), 0.0));
  std::vector<int> in_flight(topo.ues.size(), 0);
  PipelineResult res;
  res.num_ues = static_cast<int>(topo.ues.size());
  res.tasks.resize(workload.tasks.size());

  std::vector<int> pool(topo.servers.size());
  for (std::size_t j = 0; j < pool.size(); ++j)
    pool[j] = topo.servers[j].participation ? topo.servers[j].available : 0;
  std::priority_queue<Release, std::vector<Release>, std::greater<>> releases;

  const auto& tasks = workload.tasks;
  std::size_t next = 0;
  while (next < tasks.size()) {
    const long slot =
        static_cast<long>(std::floor(tasks[next].arrival_time / cfg.slot_length));
    const double now = (slot + 1) * cfg.slot_length;
    std::vector<std::size_t> batch;
    while (next < tasks.size() && tasks[next].arrival_time < now)
      batch.push_back(next++);
    while (!releases.empty() && releases.top().time <= now) {
      pool[releases.top().es] += releases.top().units;
      --in_flight[releases.top().ue];
      releases.pop();
    }
    for (std::size_t u = 0; u < topo.ues.size(); ++u)
      topo.transmitting[u] = in_flight[u] > 0;
    for (std::size_t t : batch) topo.transmitting[tasks[t].owner_ue] = true;
    for (std::size_t t : batch) FillRates(topo, cfg, tasks[t].owner_ue, rates);

    AuctionInstance in;
    std::vector<std::size_t> bid_task;
    for (std::size_t t : batch) {
      const Task& task = tasks[t];
      TaskOutcome& o = res.tasks[t];
      o.task_id = task.id;
      o.local_meets_deadline = LocalLatency(task, topo) <= task.deadline + kTol;
      Task remaining = task;
      remaining.deadline = task.deadline - (now - task.arrival_time);
      if (!(remaining.deadline > 0)) continue;
      const TaskPlan plan = PlanTask(remaining, topo, rates, cfg);
      if (!plan.offloadable) continue;
      o.offloadable = true;
      o.split = plan.split;
      BuyerBid b;
      b.ue_id = task.owner_ue;
      b.demand = plan.demand;
      b.valuation = task.valuation;
      b.deadline = remaining.deadline;
      b.budget = topo.ues[task.owner_ue].budget;
      b.split = plan.split;
      b.offload_prob = topo.ues[task.owner_ue].offload_prob;
      in.bids.push_back(b);
      std::vector<std::uint8_t> link(topo.servers.size());
      for (std::size_t j = 0; j < link.size(); ++j)
        link[j] = plan.latency[j] < kInf;
      in.link.push_back(std::move(link));
      std::vector<double> lat = plan.latency;
      for (double& l : lat)
        if (l == kInf) l = 0.0;
      in.latency.push_back(std::move(lat));
      bid_task.push_back(t);
    }
    if (in.bids.empty()) continue;
    for (std::size_t j = 0; j < topo.servers.size(); ++j) {
      const EdgeServer& es = topo.servers[j];
      SellerAsk a;
      a.es_id = es.id;
      a.resource = es.capacity;
      a.reserve_price = es.reserve_price;
      a.available = pool[j];
      a.unit_cost = es.unit_cost;
      a.participation = es.participation;
      in.asks.push_back(a);
    }
    ScreenParticipants(in);

    AuctionOutcome out;
    if (allocator == Allocator::kAuction) {
      const auto start = std::chrono::steady_clock::now();
      out = RunAuction(in, cfg);
      res.core_ms += std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    } else {
      out = LowestPriceGreedy(in);
    }
    ++res.auctions;
    const Payoffs score = Score(in, out, cfg);
    res.social_welfare += score.welfare;
    res.total_cost += score.cost;

    for (std::size_t j = 0; j < in.asks.size(); ++j)
      if (in.asks[j].participation)
        res.balance.oversupply += in.asks[j].available - out.units_sold[j];
    for (std::size_t i = 0; i < in.bids.size(); ++i) {
      if (!out.IsWinner(i)) {
        if (in.bids[i].participation) res.balance.unmet_demand += in.bids[i].demand;
        continue;
      }
      const int j = out.allocation.server[i];
      const Task& task = tasks[bid_task[i]];
      TaskOutcome& o = res.tasks[bid_task[i]];
      o.allocated = true;
      o.es = in.asks[j].es_id;
      o.payment = out.payments[i];
      const double exec = in.Latency(i, j);
      o.latency = (now - task.arrival_time) + exec;
      o.deadline_met = o.latency <= task.deadline + kTol;
      pool[j] -= in.bids[i].demand;
      releases.push({now + exec, j, in.bids[i].demand, task.owner_ue});
      ++in_flight[task.owner_ue];
    }
  }
  return res;
}

PipelineResult RunPipeline(const SystemConfig& cfg, std::uint64_t seed,
                           Allocator allocator) {
  const Topology topo = PlaceEntities(cfg, seed);
  const Workload w =
      GenerateWorkload(cfg, seed, static_cast<int>(topo.ues.size()));
  return RunPipeline(cfg, seed, allocator, w, topo);
}

double SuccessRate(std::span<const TaskOutcome> outcomes, bool count_local) {
  if (outcomes.empty()) return 0.0;
  int ok = 0;
  for (const auto& o : outcomes) {
    if (o.allocated ? o.deadline_met : count_local && o.local_meets_deadline)
      ++ok;
  }
  return static_cast<double>(ok) / outcomes.size();
}

SystemConfig ReferenceConfig() {
  SystemConfig cfg;
  cfg.num_ue = 115;
  cfg.num_es = 6;
  cfg.num_tasks = 5000;
  cfg.placement = Placement::kFixed;
  return cfg;
}

EquilibriumState BuildEquilibriumState(const SystemConfig& cfg,
                                       std::uint64_t seed) {
  const Topology topo = PlaceEntities(cfg, seed);
  const Workload w =
      GenerateWorkload(cfg, seed, static_cast<int>(topo.ues.size()));
  const RateMatrix rates = ComputeRates(topo, cfg);

  std::vector<std::vector<const Task*>> by_owner(topo.ues.size());
  for (const Task& t : w.tasks) by_owner[t.owner_ue].push_back(&t);

  EquilibriumState state;
  state.grid = MakeGrid(cfg);
  for (std::size_t u = 0; u < topo.ues.size(); ++u) {
    const auto& owned = by_owner[u];
    if (owned.empty()) continue;
    const int home = topo.ServingServer(static_cast<int>(u));
    if (home < 0) continue;
    Task rep;
    rep.owner_ue = static_cast<int>(u);
    rep.deadline = kInf;
    double len = 0, complexity = 0, local = 0, value = 0, demand = 0;
    for (const Task* t : owned) {
      len += t->len;
      complexity += t->complexity;
      if (t->local_time) local += *t->local_time;
      value += t->valuation;
      rep.deadline = std::min(rep.deadline, t->deadline);
      demand += DemandUnits(*t, topo.servers[home], cfg);
    }
    const double n = static_cast<double>(owned.size());
    rep.len = len / n;
    rep.complexity = complexity / n;
    if (owned.front()->local_time) rep.local_time = local / n;
    const int units = std::clamp(static_cast<int>(std::lround(demand / n)), 1,
                                 cfg.demand_max);
    const TaskPlan plan = PlanTask(rep, topo, rates, cfg, units);
    if (!plan.offloadable) continue;

    BuyerBid b;
    b.ue_id = static_cast<int>(u);
    b.demand = units;
    b.valuation = state.grid.valuations.front();
    b.deadline = rep.deadline;
    b.budget = topo.ues[u].budget;
    b.split = plan.split;
    b.offload_prob = topo.ues[u].offload_prob;
    state.instance.bids.push_back(b);
    state.true_values.push_back(value / n);
    std::vector<std::uint8_t> link(topo.servers.size());
    std::vector<double> lat(topo.servers.size(), 0.0);
    for (std::size_t j = 0; j < link.size(); ++j) {
      link[j] = plan.latency[j] < kInf;
      if (link[j]) lat[j] = plan.latency[j];
    }
    state.instance.link.push_back(std::move(link));
    state.instance.latency.push_back(std::move(lat));
  }
  for (const EdgeServer& es : topo.servers) {
    SellerAsk a;
    a.es_id = es.id;
    a.resource = es.capacity;
    a.reserve_price = es.reserve_price;
    a.available = es.available;
    a.unit_cost = es.unit_cost;
    a.participation = es.participation;
    state.instance.asks.push_back(a);
  }
  ScreenParticipants(state.instance);
  return state;
}

AuctionInstance RandomInstance(Rng& rng, const RandomInstanceSpec& spec) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  AuctionInstance in;
  const int k = pick(1, spec.max_bids);
  const int m = pick(1, spec.max_servers);
  for (int i = 0; i < k; ++i) {
    BuyerBid b;
    b.ue_id = i;
    b.demand = pick(1, spec.max_demand);
    b.valuation = 10.0 * pick(1, spec.valuation_points);
    b.deadline = pick(10, 75);
    b.budget = spec.budget_slack
                   ? 1e9
                   : 10.0 * pick(1, spec.valuation_points * b.demand);
    b.split = spec.full_offload ? 1.0 : 0.25 * pick(0, 4);
    in.bids.push_back(b);
  }
  for (int j = 0; j < m; ++j) {
    SellerAsk a;
    a.es_id = j;
    a.available = pick(0, spec.max_capacity);
    a.resource = spec.max_capacity;
    a.reserve_price = 0.5 * pick(0, 2);
    a.unit_cost = a.reserve_price * 0.5;
    in.asks.push_back(a);
  }
  if (spec.sparse_links) {
    std::bernoulli_distribution linked(0.75);
    in.link.assign(k, std::vector<std::uint8_t>(m));
    for (auto& row : in.link)
      for (auto& cell : row) cell = linked(rng);
  }
  return in;
}

ComplexityFit FitQuadraticLog(std::span<const double> sizes,
                              std::span<const double> times) {
  ComplexityFit fit;
  double fx = 0, ff = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const double f = sizes[k] * sizes[k] * std::log(sizes[k]);
    fx += f * times[k];
    ff += f * f;
  }
  if (!(ff > 0)) return fit;
  fit.scale = fx / ff;
  const double mean =
      std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const double f = sizes[k] * sizes[k] * std::log(sizes[k]);
    ss_res += std::pow(times[k] - fit.scale * f, 2);
    ss_tot += std::pow(times[k] - mean, 2);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res > 0 ? 0.0 : 1.0);
  return fit;
}

double TimeAuctionCore(int num_bids, std::uint64_t seed,
                       const SystemConfig& cfg) {
  Rng rng = MakeRng(seed, kScenarioStream);
  AuctionInstance in;
  for (int i = 0; i < num_bids; ++i) {
    BuyerBid b;
    b.ue_id = i;
    b.demand = std::uniform_int_distribution<int>(1, cfg.demand_max)(rng);
    b.valuation = Uniform(rng, cfg.valuation_min, cfg.valuation_max);
    b.deadline = Uniform(rng, cfg.deadline_min, cfg.deadline_max);
    b.budget = 1e12;
    in.bids.push_back(b);
  }
  // Supply grows with the bid count so that most bids win and every winner
  // needs a pivot.
  const int m = std::max(1, cfg.num_es);
  for (int j = 0; j < m; ++j) {
    SellerAsk a;
    a.es_id = j;
    a.available = (num_bids * cfg.demand_max + m - 1) / m / 2 + 1;
    a.resource = a.available;
    a.reserve_price = Uniform(rng, cfg.reserve_price_min, cfg.reserve_price_max);
    in.asks.push_back(a);
  }
  SystemConfig greedy = cfg;
  greedy.winner_mode = WinnerMode::kGreedy;
  greedy.payment_rule = PaymentRule::kClarke;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  int reps = 0;
  double sink = 0.0;
  do {
    sink += RunAuction(in, greedy).declared_welfare;
    ++reps;
  } while (reps < 3 || Clock::now() - start < std::chrono::milliseconds(40));
  const double secs =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (sink < 0) return -1.0;  // keeps the loop from being optimized away
  return secs / reps;
}

// Scenario registry.

namespace {

MetricsRow RowFromPipeline(const std::string& scenario, const char* method,
                           const SystemConfig& cfg, std::uint64_t seed,
                           const PipelineResult& r, bool record_runtime) {
  MetricsRow row;
  row.scenario = scenario;
  row.method = method;
  row.seed = seed;
  row.num_tasks = static_cast<int>(r.tasks.size());
  row.num_ues = r.num_ues;
  row.social_welfare = r.social_welfare;
  row.success_rate = SuccessRate(r.tasks, cfg.count_local_success);
  double lat = 0;
  int n = 0;
  for (const auto& t : r.tasks)
    if (t.allocated) {
      lat += t.latency;
      ++n;
    }
  row.mean_latency = n ? lat / n : 0.0;
  row.runtime_ms = record_runtime ? r.core_ms : 0.0;
  row.oversupply = r.balance.oversupply;
  row.unmet_demand = r.balance.unmet_demand;
  row.total_cost = r.total_cost;
  return row;
}

std::vector<MetricsRow> SweepPipeline(
    const std::string& scenario, const ScenarioContext& ctx,
    const std::string& param, const std::vector<double>& values,
    const std::function<void(SystemConfig&, double)>& apply,
    bool with_baseline) {
  std::vector<MetricsRow> rows;
  for (double v : values) {
    SystemConfig cfg = ctx.cfg;
    apply(cfg, v);
    for (std::uint64_t seed : ctx.seeds) {
      const Topology topo = PlaceEntities(cfg, seed);
      const Workload w =
          GenerateWorkload(cfg, seed, static_cast<int>(topo.ues.size()));
      std::vector<std::pair<Allocator, const char*>> methods = {
          {Allocator::kAuction, "auction"}};
      if (with_baseline) methods.push_back({Allocator::kLowestPrice, "lowest_price"});
      for (auto [alloc, name] : methods) {
        MetricsRow row =
            RowFromPipeline(scenario, name, cfg, seed,
                            RunPipeline(cfg, seed, alloc, w, topo),
                            ctx.record_runtime);
        row.param = param;
        row.param_value = v;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::vector<double> Range(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

std::vector<MetricsRow> WelfareVsTasks(const ScenarioContext& ctx) {
  return SweepPipeline("welfare_vs_tasks", ctx, "num_tasks",
                       Range(1000, 10000, 1000),
                       [](SystemConfig& c, double v) {
                         c.num_tasks = static_cast<int>(v);
                         c.horizon = 0;
                       },
                       true);
}

std::vector<MetricsRow> WelfareVsUes(const ScenarioContext& ctx) {
  return SweepPipeline("welfare_vs_ues", ctx, "num_ues", Range(20, 180, 40),
                       [](SystemConfig& c, double v) {
                         c.num_ue = static_cast<int>(v);
                         c.placement = Placement::kFixed;
                       },
                       true);
}

// Fixed horizon, request count swept through the arrival rate.
std::vector<MetricsRow> SuccessRateScenario(const ScenarioContext& ctx) {
  const double horizon = ctx.cfg.horizon > 0 ? ctx.cfg.horizon : 500.0;
  return SweepPipeline("success_rate", ctx, "num_requests",
                       Range(2000, 8000, 1000),
                       [horizon](SystemConfig& c, double v) {
                         c.num_tasks = static_cast<int>(v);
                         c.horizon = horizon;
                         c.arrival_rate = v / horizon;
                       },
                       true);
}

std::vector<MetricsRow> PipelineScenario(const ScenarioContext& ctx) {
  std::vector<MetricsRow> rows;
  for (std::uint64_t seed : ctx.seeds) {
    auto r = PipelineRows("pipeline", ctx.cfg, seed, ctx.record_runtime);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

// Truthful declarations on the valuation grid so that payoffs are computed
// in exact arithmetic.
EquilibriumState TruthfulGridState(const SystemConfig& cfg,
                                   std::uint64_t seed) {
  EquilibriumState state = BuildEquilibriumState(cfg, seed);
  const double step = cfg.valuation_grid_step;
  for (std::size_t i = 0; i < state.true_values.size(); ++i) {
    state.true_values[i] = std::round(state.true_values[i] / step) * step;
    state.instance.bids[i].valuation = state.true_values[i];
  }
  return state;
}

std::vector<MetricsRow> TruthfulnessScenario(const ScenarioContext& ctx) {
  constexpr double kTrueValue = 150.0;
  std::vector<MetricsRow> rows;
  for (std::uint64_t seed : ctx.seeds) {
    EquilibriumState state = TruthfulGridState(ctx.cfg, seed);
    const AuctionInstance& in = state.instance;
    // Probe: the first bidder that wins when bidding its true value.
    int probe = -1;
    for (std::size_t i = 0; i < in.bids.size() && probe < 0; ++i) {
      AuctionInstance trial = in;
      trial.bids[i].valuation = kTrueValue;
      AuctionOutcome out = RunAuction(trial, ctx.cfg);
      if (out.IsWinner(i)) probe = static_cast<int>(i);
    }
    for (double bid = 30; bid <= 300 + 1e-9; bid += 10) {
      MetricsRow row;
      row.scenario = "truthfulness";
      row.method = "auction";
      row.param = "bid";
      row.param_value = bid;
      row.seed = seed;
      row.num_ues = static_cast<int>(in.bids.size());
      if (probe >= 0)
        row.payoff = EvaluateBuyerBid(in, probe, bid, kTrueValue, ctx.cfg);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<MetricsRow> RationalityScenario(const ScenarioContext& ctx) {
  std::vector<MetricsRow> rows;
  for (std::uint64_t seed : ctx.seeds) {
    EquilibriumState state = BuildEquilibriumState(ctx.cfg, seed);
    for (std::size_t i = 0; i < state.true_values.size(); ++i)
      state.instance.bids[i].valuation = state.true_values[i];
    const RoundResult round = RunAuctionRound(state, ctx.cfg);
    for (std::size_t i = 0; i < state.instance.bids.size(); ++i) {
      MetricsRow row;
      row.scenario = "rationality";
      row.method = "auction";
      row.param = "ue_id";
      row.param_value = state.instance.bids[i].ue_id;
      row.seed = seed;
      row.num_ues = static_cast<int>(state.instance.bids.size());
      row.social_welfare = round.welfare;
      row.payoff = round.buyer_payoffs[i];
      row.total_cost = round.total_cost;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<MetricsRow> RuntimeScenario(const ScenarioContext& ctx) {
  std::vector<MetricsRow> rows;
  for (int k : {25, 50, 100, 200}) {
    for (std::uint64_t seed : ctx.seeds) {
      MetricsRow row;
      row.scenario = "runtime";
      row.method = "auction_greedy";
      row.param = "num_bids";
      row.param_value = k;
      row.seed = seed;
      row.num_ues = k;
      row.runtime_ms = 1e3 * TimeAuctionCore(k, seed, ctx.cfg);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<MetricsRow> ConvergenceScenario(const ScenarioContext& ctx) {
  std::vector<MetricsRow> rows;
  for (std::uint64_t seed : ctx.seeds) {
    EquilibriumState state = BuildEquilibriumState(ctx.cfg, seed);
    const double initial = RunAuctionRound(state, ctx.cfg).total_cost;
    const double eps = initial > 0 ? 1e-3 * initial : 1e-9;
    const auto start = std::chrono::steady_clock::now();
    const EquilibriumReport rep =
        RunToEquilibrium(state, ctx.cfg, eps, 200, 5);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    if (ctx.trace_out) WriteEquilibriumCsv(rep, *ctx.trace_out);
    for (std::size_t k = 0; k < rep.cost_trace.size(); ++k) {
      MetricsRow row;
      row.scenario = "convergence";
      row.method = "auction";
      row.param = "sweep";
      row.param_value = static_cast<double>(k + 1);
      row.seed = seed;
      row.num_ues = static_cast<int>(state.instance.bids.size());
      row.social_welfare = rep.welfare_trace[k];
      row.total_cost = rep.cost_trace[k];
      row.iterations_to_converge = rep.converged ? rep.iterations : -1;
      row.runtime_ms = ctx.record_runtime ? ms : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

const std::map<std::string, ScenarioFn>& Registry() {
  static const std::map<std::string, ScenarioFn> registry = {
      {"convergence", ConvergenceScenario},
      {"pipeline", PipelineScenario},
      {"rationality", RationalityScenario},
      {"runtime", RuntimeScenario},
      {"success_rate", SuccessRateScenario},
      {"truthfulness", TruthfulnessScenario},
      {"welfare_vs_tasks", WelfareVsTasks},
      {"welfare_vs_ues", WelfareVsUes},
  };
  return registry;
}

std::string JoinNames() {
  std::string s;
  for (const auto& [name, fn] : Registry()) s += (s.empty() ? "" : ", ") + name;
  return s;
}

}  // namespace

UnknownScenarioError::UnknownScenarioError(const std::string& name)
    : std::invalid_argument("unknown scenario '" + name +
                            "'; registered: " + JoinNames()) {}

std::vector<std::string> ScenarioNames() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : Registry()) names.push_back(name);
  return names;
}

std::vector<MetricsRow> RunScenario(const std::string& name,
                                    const ScenarioContext& ctx) {
  const auto it = Registry().find(name);
  if (it == Registry().end()) throw UnknownScenarioError(name);
  return it->second(ctx);
}

std::vector<MetricsRow> PipelineRows(const std::string& scenario,
                                     const SystemConfig& cfg,
                                     std::uint64_t seed, bool record_runtime) {
  const Topology topo = PlaceEntities(cfg, seed);
  const Workload w =
      GenerateWorkload(cfg, seed, static_cast<int>(topo.ues.size()));
  return {RowFromPipeline(scenario, "auction", cfg, seed,
                          RunPipeline(cfg, seed, Allocator::kAuction, w, topo),
                          record_runtime),
          RowFromPipeline(scenario, "lowest_price", cfg, seed,
                          RunPipeline(cfg, seed, Allocator::kLowestPrice, w, topo),
                          record_runtime)};
}

}  // namespace offload
