// Demand-supply cost model and the matching optimizer that assigns each task
// a split and a server (or keeps it local) under capacity and deadline
// constraints.

#ifndef OFFLOAD_MARKET_H_
#define OFFLOAD_MARKET_H_

#include <ostream>
#include <vector>

#include "offload/model.h"
#include "offload/radio.h"

namespace offload {

// Resource units a task needs from `es` to finish its offloaded work within
// the deadline: ceil(cycles / (deadline * speed_per_unit)), clamped to
// [1, demand_max] and to the task's demand cap.
int DemandUnits(const Task& task, const EdgeServer& es, const SystemConfig& cfg);

// Weighted cost of running (1 - split) locally and split remotely:
//   (1 - x) w1 L_local + x (w1 L_offload + w2 d p)
// where both latencies are those of the whole task on that side.
double TotalCost(double split, double local_latency, double offload_latency,
                 int demand_units, double unit_price, const SystemConfig& cfg);

// Same, with latencies computed for `task` at `rate` bits/s.
double TotalCost(const Task& task, const UserEquipment& ue,
                 const EdgeServer& es, double split, int demand_units,
                 double rate, const SystemConfig& cfg);

struct SplitRange {
  double lo = 0.0;
  double hi = 1.0;
  bool empty = false;
};

// Largest interval of splits whose total latency meets the deadline. An
// unreachable server (rate 0) admits only split 0.
SplitRange FeasibleSplitRange(const Task& task, const UserEquipment& ue,
                              const EdgeServer& es, int demand_units,
                              double rate, const SystemConfig& cfg);

struct MarketInstance {
  std::vector<Task> tasks;
  std::vector<UserEquipment> ues;  // indexed by Task::owner_ue
  std::vector<EdgeServer> servers;
  std::vector<std::vector<double>> rate;  // [task][es]; 0 = unreachable
};

// Rates come from the topology; servers not covering the owner are
// unreachable.
MarketInstance BuildMarketInstance(const std::vector<Task>& tasks,
                                   const Topology& topology,
                                   const SystemConfig& cfg);

inline constexpr int kLocal = -1;

struct Assignment {
  int task_id = 0;
  int es = kLocal;
  double split = 0.0;
  int demand_units = 0;
  double cost = 0.0;
  double latency = 0.0;
  bool deadline_met = false;
  // Demand of a cheaper offload option that capacity ruled out, else 0.
  int blocked_demand = 0;
};

struct Matching {
  std::vector<Assignment> assignments;  // one per task, input order
  std::vector<int> used;                // units allocated per server
  double objective = 0.0;
};

enum class SolverMode { kExact, kGreedy };

// Exact mode searches every (server, grid split) option per task with
// branch and bound; greedy mode places tasks by deadline, cheapest option
// first, then applies single-task moves until none lowers the objective.
Matching MatchDemandSupply(const MarketInstance& instance,
                           const SystemConfig& cfg,
                           SolverMode mode = SolverMode::kExact);

struct MarketBalance {
  int oversupply = 0;
  int unmet_demand = 0;
};

MarketBalance MarketBalanceReport(const Matching& matching,
                                  const std::vector<EdgeServer>& servers);

// Candidate split grid {step, 2 step, ..., 1} intersected with `range`.
std::vector<double> SplitGrid(const SplitRange& range, double step);

// task_id,es_id_or_local,split,demand_units,cost_component
void WriteMatchingCsv(const Matching& matching, std::ostream& out);

}  // namespace offload

#endif  // OFFLOAD_MARKET_H_
