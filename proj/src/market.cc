#include "offload/market.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>

namespace offload {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-12;

double FullLocalLatency(const Task& task, const UserEquipment& ue) {
  return LocalProcessingTime(0.0, task, ue);
}

double FullOffloadLatency(const Task& task, const EdgeServer& es,
                          int demand_units, double rate) {
  if (!(rate > 0) || demand_units <= 0) return kInf;
  return TransmissionTime(1.0, task.len, rate) +
         RemoteProcessingTime(1.0, task, demand_units, es);
}

double CombinedLatency(double split, double local_full, double offload_full,
                       const SystemConfig& cfg) {
  const double off = split > 0 ? split * offload_full : 0.0;
  const double loc = split < 1 ? (1.0 - split) * local_full : 0.0;
  return cfg.execution_mode == ExecutionMode::kConcurrent ? std::max(off, loc)
                                                          : off + loc;
}

SplitRange RangeFromLatencies(double local_full, double offload_full,
                              double deadline, const SystemConfig& cfg) {
  SplitRange r;
  const double a = offload_full;
  const double b = local_full;
  const double d = deadline;
  if (std::isinf(a)) {
    r.lo = r.hi = 0.0;
    r.empty = b > d;
    return r;
  }
  if (cfg.execution_mode == ExecutionMode::kConcurrent) {
    r.hi = a > 0 ? std::min(1.0, d / a) : 1.0;
    r.lo = b > 0 ? std::max(0.0, 1.0 - d / b) : 0.0;
  } else if (a == b) {
    r.lo = 0.0;
    r.hi = 1.0;
    r.empty = b > d;
    return r;
  } else if (a > b) {
    r.lo = 0.0;
    r.hi = std::min(1.0, (d - b) / (a - b));
  } else {
    r.lo = std::max(0.0, (b - d) / (b - a));
    r.hi = 1.0;
  }
  r.empty = r.lo > r.hi;
  return r;
}

struct Option {
  int es = kLocal;
  double split = 0.0;
  int demand = 0;
  double cost = 0.0;
  double latency = 0.0;
  bool deadline_met = false;
};

std::vector<std::vector<Option>> BuildOptions(const MarketInstance& in,
                                              const SystemConfig& cfg) {
  std::vector<std::vector<Option>> all(in.tasks.size());
  for (std::size_t t = 0; t < in.tasks.size(); ++t) {
    const Task& task = in.tasks[t];
    const UserEquipment& ue = in.ues.at(task.owner_ue);
    const double local_full = FullLocalLatency(task, ue);
    Option local;
    local.cost = TotalCost(0.0, local_full, 0.0, 0, 0.0, cfg);
    local.latency = local_full;
    local.deadline_met = local_full <= task.deadline + kEps;
    all[t].push_back(local);
    for (std::size_t j = 0; j < in.servers.size(); ++j) {
      const EdgeServer& es = in.servers[j];
      const double rate = in.rate[t][j];
      if (!es.participation || !(rate > 0)) continue;
      const int demand = DemandUnits(task, es, cfg);
      const double offload_full = FullOffloadLatency(task, es, demand, rate);
      const SplitRange range =
          RangeFromLatencies(local_full, offload_full, task.deadline, cfg);
      for (double x : SplitGrid(range, cfg.split_step)) {
        Option o;
        o.es = static_cast<int>(j);
        o.split = x;
        o.demand = demand;
        o.cost = TotalCost(x, local_full, offload_full, demand,
                           es.reserve_price, cfg);
        o.latency = CombinedLatency(x, local_full, offload_full, cfg);
        o.deadline_met = true;
        all[t].push_back(o);
      }
    }
    std::stable_sort(all[t].begin(), all[t].end(),
                     [](const Option& a, const Option& b) {
                       return a.cost < b.cost;
                     });
  }
  return all;
}

bool Fits(const Option& o, const std::vector<int>& residual) {
  return o.es == kLocal || o.demand <= residual[o.es];
}

Matching Assemble(const MarketInstance& in,
                  const std::vector<std::vector<Option>>& options,
                  const std::vector<int>& choice) {
  Matching m;
  m.used.assign(in.servers.size(), 0);
  m.assignments.resize(in.tasks.size());
  for (std::size_t t = 0; t < in.tasks.size(); ++t) {
    const Option& o = options[t][choice[t]];
    Assignment& a = m.assignments[t];
    a.task_id = in.tasks[t].id;
    a.es = o.es;
    a.split = o.split;
    a.demand_units = o.demand;
    a.cost = o.cost;
    a.latency = o.latency;
    a.deadline_met = o.deadline_met;
    if (o.es != kLocal) m.used[o.es] += o.demand;
    m.objective += o.cost;
  }
  for (std::size_t t = 0; t < in.tasks.size(); ++t) {
    Assignment& a = m.assignments[t];
    if (a.es != kLocal) continue;
    // options are cost-sorted; the first one is the capacity-free optimum.
    const Option& best = options[t].front();
    if (best.es != kLocal && best.cost < a.cost) a.blocked_demand = best.demand;
  }
  return m;
}

std::vector<int> Residual(const MarketInstance& in) {
  std::vector<int> r(in.servers.size());
  for (std::size_t j = 0; j < in.servers.size(); ++j)
    r[j] = in.servers[j].participation ? in.servers[j].available : 0;
  return r;
}

std::vector<int> SolveGreedy(const MarketInstance& in,
                             const std::vector<std::vector<Option>>& options) {
  const std::size_t n = in.tasks.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (in.tasks[a].deadline != in.tasks[b].deadline)
      return in.tasks[a].deadline < in.tasks[b].deadline;
    return in.tasks[a].id < in.tasks[b].id;
  });

  std::vector<int> residual = Residual(in);
  std::vector<int> choice(n, 0);
  for (std::size_t t : order) {
    for (std::size_t k = 0; k < options[t].size(); ++k) {
      if (Fits(options[t][k], residual)) {
        choice[t] = static_cast<int>(k);
        break;
      }
    }
    const Option& o = options[t][choice[t]];
    if (o.es != kLocal) residual[o.es] -= o.demand;
  }

  // Single-task moves until no move lowers the objective.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t t : order) {
      const Option& cur = options[t][choice[t]];
      if (cur.es != kLocal) residual[cur.es] += cur.demand;
      int pick = choice[t];
      for (std::size_t k = 0; k < options[t].size(); ++k) {
        const Option& o = options[t][k];
        if (o.cost < options[t][pick].cost - kEps && Fits(o, residual))
          pick = static_cast<int>(k);
      }
      if (pick != choice[t]) {
        choice[t] = pick;
        improved = true;
      }
      const Option& now = options[t][choice[t]];
      if (now.es != kLocal) residual[now.es] -= now.demand;
    }
  }
  return choice;
}

std::vector<int> SolveExact(const MarketInstance& in,
                            const std::vector<std::vector<Option>>& options) {
  const std::size_t n = in.tasks.size();
  std::vector<int> best = SolveGreedy(in, options);
  double best_cost = 0.0;
  for (std::size_t t = 0; t < n; ++t) best_cost += options[t][best[t]].cost;

  // suffix[t] = sum of capacity-free minimum costs of tasks t..n-1.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t t = n; t-- > 0;)
    suffix[t] = suffix[t + 1] + options[t].front().cost;

  std::vector<int> residual = Residual(in);
  std::vector<int> choice(n, 0);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t t,
                                                     double cost) {
    if (t == n) {
      if (cost < best_cost) {
        best_cost = cost;
        best = choice;
      }
      return;
    }
    for (std::size_t k = 0; k < options[t].size(); ++k) {
      const Option& o = options[t][k];
      if (cost + o.cost + suffix[t + 1] >= best_cost) break;  // sorted by cost
      if (!Fits(o, residual)) continue;
      if (o.es != kLocal) residual[o.es] -= o.demand;
      choice[t] = static_cast<int>(k);
      dfs(t + 1, cost + o.cost);
      if (o.es != kLocal) residual[o.es] += o.demand;
    }
  };
  dfs(0, 0.0);
  return best;
}

}  // namespace

int DemandUnits(const Task& task, const EdgeServer& es,
                const SystemConfig& cfg) {
  const double cycles = task.complexity * task.len;
  const double per_unit = task.deadline * es.speed_per_unit;
  double units = std::isinf(per_unit) ? 1.0 : std::ceil(cycles / per_unit);
  double cap = cfg.demand_max;
  if (task.demand_cap > 0) cap = std::min(cap, double(task.demand_cap));
  units = std::clamp(units, 1.0, cap);
  return static_cast<int>(units);
}

double TotalCost(double split, double local_latency, double offload_latency,
                 int demand_units, double unit_price, const SystemConfig& cfg) {
  const double w1 = cfg.latency_weight;
  const double w2 = cfg.price_weight;
  double cost = 0.0;
  if (split < 1) cost += (1.0 - split) * (w1 * local_latency);
  if (split > 0)
    cost += split * (w1 * offload_latency + w2 * demand_units * unit_price);
  return cost;
}

double TotalCost(const Task& task, const UserEquipment& ue,
                 const EdgeServer& es, double split, int demand_units,
                 double rate, const SystemConfig& cfg) {
  const double offload =
      split > 0 ? FullOffloadLatency(task, es, demand_units, rate) : 0.0;
  return TotalCost(split, FullLocalLatency(task, ue), offload, demand_units,
                   es.reserve_price, cfg);
}

SplitRange FeasibleSplitRange(const Task& task, const UserEquipment& ue,
                              const EdgeServer& es, int demand_units,
                              double rate, const SystemConfig& cfg) {
  return RangeFromLatencies(FullLocalLatency(task, ue),
                            FullOffloadLatency(task, es, demand_units, rate),
                            task.deadline, cfg);
}

MarketInstance BuildMarketInstance(const std::vector<Task>& tasks,
                                   const Topology& topology,
                                   const SystemConfig& cfg) {
  MarketInstance in;
  in.tasks = tasks;
  in.ues = topology.ues;
  in.servers = topology.servers;
  in.rate.assign(tasks.size(), std::vector<double>(topology.servers.size()));
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const int ue = tasks[t].owner_ue;
    for (std::size_t j = 0; j < topology.servers.size(); ++j)
      if (topology.Covers(static_cast<int>(j), ue))
        in.rate[t][j] = TransmissionRate(ue, static_cast<int>(j), topology, cfg);
  }
  return in;
}

std::vector<double> SplitGrid(const SplitRange& range, double step) {
  std::vector<double> grid;
  if (range.empty) return grid;
  const int n = static_cast<int>(std::lround(1.0 / step));
  for (int k = 1; k <= n; ++k) {
    const double x = k == n ? 1.0 : k * step;
    if (x >= range.lo - kEps && x <= range.hi + kEps) grid.push_back(x);
  }
  return grid;
}

Matching MatchDemandSupply(const MarketInstance& instance,
                           const SystemConfig& cfg, SolverMode mode) {
  const auto options = BuildOptions(instance, cfg);
  const auto choice = mode == SolverMode::kExact
                          ? SolveExact(instance, options)
                          : SolveGreedy(instance, options);
  return Assemble(instance, options, choice);
}

MarketBalance MarketBalanceReport(const Matching& matching,
                                  const std::vector<EdgeServer>& servers) {
  MarketBalance b;
  for (std::size_t j = 0; j < servers.size(); ++j) {
    const int supply = servers[j].participation ? servers[j].available : 0;
    b.oversupply += std::max(0, supply - matching.used[j]);
  }
  for (const auto& a : matching.assignments) b.unmet_demand += a.blocked_demand;
  return b;
}

void WriteMatchingCsv(const Matching& matching, std::ostream& out) {
  out << "task_id,es_id_or_local,split,demand_units,cost_component\n"
      << std::setprecision(10);
  for (const auto& a : matching.assignments) {
    out << a.task_id << ',';
    if (a.es == kLocal)
      out << "local";
    else
      out << a.es;
    out << ',' << a.split << ',' << a.demand_units << ',' << a.cost << '\n';
  }
}

}  // namespace offload
