// Experiment harness: the slotted simulation pipeline, a price-greedy
// baseline, registered scenarios, metrics rows and CSV output.

#ifndef OFFLOAD_HARNESS_H_
#define OFFLOAD_HARNESS_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/game.h"
#include "offload/market.h"
#include "offload/model.h"
#include "offload/radio.h"
#include "offload/rng.h"
#include "offload/workload.h"

namespace offload {

struct MetricsRow {
  std::string scenario;
  std::string method;
  std::string param;
  double param_value = 0.0;
  std::uint64_t seed = 0;
  int num_tasks = 0;
  int num_ues = 0;
  double social_welfare = 0.0;
  double success_rate = 0.0;
  double mean_latency = 0.0;
  double runtime_ms = 0.0;
  int iterations_to_converge = 0;
  int oversupply = 0;
  int unmet_demand = 0;
  double payoff = 0.0;      // probe bidder payoff where a scenario has one
  double total_cost = 0.0;  // winners' weighted latency plus payment
};

inline constexpr const char* kMetricsHeader =
    "scenario,method,param,param_value,seed,num_tasks,num_ues,social_welfare,"
    "success_rate,mean_latency,runtime_ms,iterations_to_converge,oversupply,"
    "unmet_demand,payoff,total_cost";

void EmitCsv(std::span<const MetricsRow> rows, std::ostream& out);
// Throws std::runtime_error when the file cannot be written.
void EmitCsv(std::span<const MetricsRow> rows, const std::string& path);

enum class Allocator { kAuction, kLowestPrice };

struct TaskOutcome {
  int task_id = 0;
  bool offloadable = false;  // some server could meet the deadline
  bool allocated = false;
  int es = -1;
  double split = 0.0;
  double latency = 0.0;  // waiting plus execution, seconds
  bool deadline_met = false;
  bool local_meets_deadline = false;
  double payment = 0.0;
};

struct PipelineResult {
  std::vector<TaskOutcome> tasks;
  int num_ues = 0;
  int auctions = 0;
  double social_welfare = 0.0;
  double total_cost = 0.0;
  double core_ms = 0.0;  // wall clock inside winner determination and pricing
  MarketBalance balance;
};

// Places entities, generates (or takes) the workload, then runs one
// allocation per slot over the tasks that arrived in it. Each task bids for
// its cost-minimizing feasible split at the nearest covering server; other
// covering servers are linked when they meet the deadline at that split.
// Allocated units return to the pool once the task completes.
PipelineResult RunPipeline(const SystemConfig& cfg, std::uint64_t seed,
                           Allocator allocator);
PipelineResult RunPipeline(const SystemConfig& cfg, std::uint64_t seed,
                           Allocator allocator, const Workload& workload,
                           const Topology& topology);

// Fraction of tasks allocated that met their deadline. Unallocated tasks
// count only when `count_local` is set and local execution meets the
// deadline.
double SuccessRate(std::span<const TaskOutcome> outcomes, bool count_local);

// The reference setting with one aggregated bid per UE: demand from the mean
// task, mean valuation, tightest deadline, cost-optimal split for the mean
// task. Placement is fixed. Bids start at the lowest grid valuation, asks at
// the placed reserve prices.
EquilibriumState BuildEquilibriumState(const SystemConfig& cfg,
                                       std::uint64_t seed);
SystemConfig ReferenceConfig();

struct RandomInstanceSpec {
  int max_bids = 4;
  int max_servers = 2;
  int max_capacity = 3;
  int max_demand = 2;
  int valuation_points = 10;  // valuations drawn from {10, 20, ...}
  bool budget_slack = true;
  bool full_offload = false;  // every split 1, else splits in [0,1]
  bool sparse_links = true;
};

// Small random auction with integral capacities and grid valuations.
AuctionInstance RandomInstance(Rng& rng, const RandomInstanceSpec& spec);

struct ScenarioContext {
  SystemConfig cfg;
  std::vector<std::uint64_t> seeds;
  bool record_runtime = false;
  std::ostream* trace_out = nullptr;  // equilibrium trace, when wanted
};

using ScenarioFn = std::function<std::vector<MetricsRow>(const ScenarioContext&)>;

class UnknownScenarioError : public std::invalid_argument {
 public:
  explicit UnknownScenarioError(const std::string& name);
};

std::vector<std::string> ScenarioNames();
// Throws UnknownScenarioError listing the registered names.
std::vector<MetricsRow> RunScenario(const std::string& name,
                                    const ScenarioContext& ctx);

// Single pipeline point per method, used for parameter sweeps.
std::vector<MetricsRow> PipelineRows(const std::string& scenario,
                                     const SystemConfig& cfg,
                                     std::uint64_t seed, bool record_runtime);

struct ComplexityFit {
  double scale = 0.0;  // c in c * K^2 log K
  double r_squared = 0.0;
};

// Least squares through the origin on the K^2 log K feature.
ComplexityFit FitQuadraticLog(std::span<const double> sizes,
                              std::span<const double> times);

// Mean seconds for one greedy auction (winners and all payments) over K
// bids on the runtime-scenario market.
double TimeAuctionCore(int num_bids, std::uint64_t seed,
                       const SystemConfig& cfg);

}  // namespace offload

#endif  // OFFLOAD_HARNESS_H_
