// Domain types and validated configuration shared by every module.
//
// Units: task length in bits, complexity in cycles/bit, compute speed in
// cycles/s, resources in integer "cores", prices and budgets in abstract
// money units, time in seconds, power in watts (linear).

#ifndef OFFLOAD_MODEL_H_
#define OFFLOAD_MODEL_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace offload {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double Distance(const Point& a, const Point& b);

struct Task {
  int id = 0;
  double arrival_time = 0.0;
  double len = 0.0;         // bits
  double complexity = 0.0;  // cycles per bit
  double deadline = 0.0;    // seconds, relative to arrival
  double split = 0.0;       // offloaded fraction
  int owner_ue = 0;
  // Sampled local processing time for the whole task. When absent the
  // local time is derived from the owner's local speed.
  std::optional<double> local_time;
  // Declared value per resource unit and ceiling on payments. Only used by
  // workload-driven scenarios.
  double valuation = 0.0;
  // Upper bound on resource units, 0 for none.
  int demand_cap = 0;

  // Throws std::invalid_argument on a violated invariant.
  void Validate() const;
};

struct UserEquipment {
  int id = 0;
  Point position;
  double budget = 0.0;
  double local_speed = 1e9;  // cycles per second
  double offload_prob = 1.0;
  double tx_power = 1.0;     // watts
  bool participation = true;

  void Validate() const;
};

struct EdgeServer {
  int id = 0;
  Point position;
  int capacity = 0;   // resource units
  int available = 0;  // resource units
  double speed_per_unit = 1e8;  // cycles per second per unit
  double reserve_price = 0.0;   // money per unit
  double unit_cost = 0.0;       // money per unit
  bool participation = true;
  double coverage_radius = 500.0;

  void Validate() const;
};

enum class ExecutionMode { kConcurrent, kSequential };
enum class LocalTimeMode { kSampled, kDerived };
enum class WinnerMode { kExact, kGreedy };
enum class PaymentRule { kClarke, kIncentive };
enum class SellerRevenue { kIncome, kReservePrice };
enum class Placement { kPpp, kFixed };

struct SystemConfig {
  // Population and geometry.
  int num_ue = 115;
  int num_es = 6;
  int num_tasks = 1000;
  double region_side = 1900.0;
  double ue_intensity = 18.0 / (3.14159265358979323846 * 500.0 * 500.0);
  double es_intensity = 6.0 / (1900.0 * 1900.0);
  Placement placement = Placement::kPpp;
  double coverage_radius = 500.0;

  // Radio.
  double bandwidth = 10e6;
  int num_subchannels = 100;
  double mean_subchannel_request = 1.0;
  int subchannel_min = 1;
  int subchannel_max = 4;
  double noise_dbm_per_hz = -174.0;
  double tx_power_dbm = 35.0;
  double pathloss_exponent = 3.5;

  // Cost weights and mechanism.
  double latency_weight = 0.5;
  double price_weight = 0.5;
  double incentive_factor = 0.0;
  double risk_weight = 0.0;
  ExecutionMode execution_mode = ExecutionMode::kConcurrent;
  WinnerMode winner_mode = WinnerMode::kExact;
  PaymentRule payment_rule = PaymentRule::kClarke;
  SellerRevenue seller_revenue = SellerRevenue::kIncome;
  std::uint64_t seed = 1;

  // Workload.
  double arrival_rate = 2.0;  // tasks per second
  double horizon = 0.0;       // seconds; 0 means num_tasks / arrival_rate
  double task_len_min = 1e6;
  double task_len_max = 8e6;
  double complexity_min = 1000.0;
  double complexity_max = 1000.0;
  double deadline_min = 10.0;
  double deadline_max = 75.0;
  LocalTimeMode local_time_mode = LocalTimeMode::kSampled;
  double local_time_min = 3.0;
  double local_time_max = 8.0;
  double local_speed = 1e9;
  double valuation_min = 30.0;
  double valuation_max = 500.0;
  double budget_min = 2000.0;
  double budget_max = 4000.0;
  double offload_prob = 1.0;

  // Servers.
  int es_capacity = 32;
  double availability_min = 0.0;
  double availability_max = 1.0;
  double reserve_price_min = 0.1;
  double reserve_price_max = 1.0;
  double unit_cost_ratio_min = 0.2;
  double unit_cost_ratio_max = 0.9;
  double speed_per_unit = 1e8;
  int demand_max = 4;

  // Simulation.
  double slot_length = 1.0;
  double split_step = 0.05;
  bool count_local_success = false;
  double valuation_grid_step = 10.0;
  int price_grid_points = 10;
  // Cycles executed per second of trace runtime.
  double trace_cycles_per_second = 1e9;

  double TxPowerWatts() const;
  // Noise power over the full bandwidth, watts.
  double NoiseVariance() const;
  double EffectiveHorizon() const;
};

// Error naming the offending configuration field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Builds a config from a flat JSON object. Absent keys take their defaults;
// unknown keys, wrong types and out-of-range values throw ConfigError.
SystemConfig ValidateConfig(const nlohmann::json& raw);

// Inverse of ValidateConfig. Derived fields are omitted.
nlohmann::json SerializeConfig(const SystemConfig& cfg);

// Reads and validates a config file. An empty path yields the defaults.
SystemConfig LoadConfigFile(const std::string& path);

bool operator==(const SystemConfig& a, const SystemConfig& b);

// Power spectral density in dBm/Hz integrated over `bandwidth` Hz, in watts.
double DbmPerHzToWatts(double level_dbm_per_hz, double bandwidth_hz);
double DbmToWatts(double dbm);

}  // namespace offload

#endif  // OFFLOAD_MODEL_H_
