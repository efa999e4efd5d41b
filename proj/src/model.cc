#include "offload/model.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace offload {

double Distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void Task::Validate() const {
  if (!(len > 0)) throw std::invalid_argument("task len must be > 0");
  if (!(complexity > 0))
    throw std::invalid_argument("task complexity must be > 0");
  if (!(deadline > 0)) throw std::invalid_argument("task deadline must be > 0");
  if (!(split >= 0 && split <= 1))
    throw std::invalid_argument("task split must lie in [0,1]");
  if (demand_cap < 0)
    throw std::invalid_argument("task demand_cap must be >= 0");
}

void UserEquipment::Validate() const {
  if (!(budget >= 0)) throw std::invalid_argument("ue budget must be >= 0");
  if (!(local_speed > 0))
    throw std::invalid_argument("ue local_speed must be > 0");
  if (!(offload_prob >= 0 && offload_prob <= 1))
    throw std::invalid_argument("ue offload_prob must lie in [0,1]");
}

void EdgeServer::Validate() const {
  if (available < 0 || available > capacity)
    throw std::invalid_argument("es available must lie in [0, capacity]");
  if (!(reserve_price >= 0))
    throw std::invalid_argument("es reserve_price must be >= 0");
  if (!(unit_cost >= 0)) throw std::invalid_argument("es unit_cost must be >= 0");
}

double SystemConfig::TxPowerWatts() const { return DbmToWatts(tx_power_dbm); }

double SystemConfig::NoiseVariance() const {
  return DbmPerHzToWatts(noise_dbm_per_hz, bandwidth);
}

double SystemConfig::EffectiveHorizon() const {
  return horizon > 0 ? horizon : num_tasks / arrival_rate;
}

double DbmToWatts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double DbmPerHzToWatts(double level_dbm_per_hz, double bandwidth_hz) {
  return DbmToWatts(level_dbm_per_hz) * bandwidth_hz;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Bound { kClosed, kOpen };

// One configuration key: how to read it from JSON into the config and how to
// write it back.
struct Field {
  std::string name;
  std::function<void(SystemConfig&, const nlohmann::json&)> read;
  std::function<nlohmann::json(const SystemConfig&)> write;
};

std::string FormatBound(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Field Real(std::string name, double SystemConfig::*member, double lo,
           Bound lo_kind, double hi, Bound hi_kind) {
  return Field{
      name,
      [=](SystemConfig& cfg, const nlohmann::json& v) {
        if (!v.is_number()) throw ConfigError(name, "expected a number");
        const double x = v.get<double>();
        const bool lo_ok = lo_kind == Bound::kClosed ? x >= lo : x > lo;
        const bool hi_ok = hi_kind == Bound::kClosed ? x <= hi : x < hi;
        if (!std::isfinite(x) || !lo_ok || !hi_ok) {
          throw ConfigError(
              name, "value " + FormatBound(x) + " outside " +
                        (lo_kind == Bound::kClosed ? "[" : "(") +
                        FormatBound(lo) + ", " + FormatBound(hi) +
                        (hi_kind == Bound::kClosed ? "]" : ")"));
        }
        cfg.*member = x;
      },
      [=](const SystemConfig& cfg) { return nlohmann::json(cfg.*member); }};
}

Field Count(std::string name, int SystemConfig::*member, int lo) {
  return Field{
      name,
      [=](SystemConfig& cfg, const nlohmann::json& v) {
        if (!v.is_number_integer())
          throw ConfigError(name, "expected an integer");
        const auto x = v.get<long long>();
        if (x < lo || x > std::numeric_limits<int>::max())
          throw ConfigError(name, "value " + std::to_string(x) +
                                      " below minimum " + std::to_string(lo));
        cfg.*member = static_cast<int>(x);
      },
      [=](const SystemConfig& cfg) { return nlohmann::json(cfg.*member); }};
}

Field Flag(std::string name, bool SystemConfig::*member) {
  return Field{name,
               [=](SystemConfig& cfg, const nlohmann::json& v) {
                 if (!v.is_boolean())
                   throw ConfigError(name, "expected true or false");
                 cfg.*member = v.get<bool>();
               },
               [=](const SystemConfig& cfg) {
                 return nlohmann::json(cfg.*member);
               }};
}

template <typename E>
Field Choice(std::string name, E SystemConfig::*member,
             std::vector<std::pair<std::string, E>> options) {
  return Field{
      name,
      [=](SystemConfig& cfg, const nlohmann::json& v) {
        if (!v.is_string()) throw ConfigError(name, "expected a string");
        const auto s = v.get<std::string>();
        for (const auto& [label, value] : options) {
          if (label == s) {
            cfg.*member = value;
            return;
          }
        }
        std::string allowed;
        for (const auto& o : options)
          allowed += (allowed.empty() ? "" : ", ") + o.first;
        throw ConfigError(name, "'" + s + "' is not one of {" + allowed + "}");
      },
      [=](const SystemConfig& cfg) {
        for (const auto& [label, value] : options)
          if (value == cfg.*member) return nlohmann::json(label);
        return nlohmann::json(options.front().first);
      }};
}

const std::vector<Field>& Fields() {
  using C = SystemConfig;
  static const std::vector<Field> fields = {
      Count("num_ue", &C::num_ue, 1),
      Count("num_es", &C::num_es, 1),
      Count("num_tasks", &C::num_tasks, 1),
      Real("region_side", &C::region_side, 0, Bound::kOpen, kInf, Bound::kOpen),
      Real("ue_intensity", &C::ue_intensity, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("es_intensity", &C::es_intensity, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Choice<Placement>("placement", &C::placement,
                        {{"ppp", Placement::kPpp}, {"fixed", Placement::kFixed}}),
      Real("coverage_radius", &C::coverage_radius, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("bandwidth", &C::bandwidth, 0, Bound::kOpen, kInf, Bound::kOpen),
      Count("num_subchannels", &C::num_subchannels, 1),
      Real("mean_subchannel_request", &C::mean_subchannel_request, 0,
           Bound::kClosed, kInf, Bound::kOpen),
      Count("subchannel_min", &C::subchannel_min, 1),
      Count("subchannel_max", &C::subchannel_max, 1),
      Real("noise_dbm_per_hz", &C::noise_dbm_per_hz, -kInf, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("tx_power_dbm", &C::tx_power_dbm, -kInf, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("pathloss_exponent", &C::pathloss_exponent, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("latency_weight", &C::latency_weight, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("price_weight", &C::price_weight, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("incentive_factor", &C::incentive_factor, 0, Bound::kClosed, 1,
           Bound::kOpen),
      Real("risk_weight", &C::risk_weight, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Choice<ExecutionMode>("execution_mode", &C::execution_mode,
                            {{"concurrent", ExecutionMode::kConcurrent},
                             {"sequential", ExecutionMode::kSequential}}),
      Choice<WinnerMode>("winner_mode", &C::winner_mode,
                         {{"exact", WinnerMode::kExact},
                          {"greedy", WinnerMode::kGreedy}}),
      Choice<PaymentRule>("payment_rule", &C::payment_rule,
                          {{"clarke", PaymentRule::kClarke},
                           {"incentive", PaymentRule::kIncentive}}),
      Choice<SellerRevenue>("seller_revenue", &C::seller_revenue,
                            {{"income", SellerRevenue::kIncome},
                             {"reserve_price", SellerRevenue::kReservePrice}}),
      Field{"seed",
            [](SystemConfig& cfg, const nlohmann::json& v) {
              if (!v.is_number_unsigned() && !v.is_number_integer())
                throw ConfigError("seed", "expected a non-negative integer");
              if (v.is_number_integer() && !v.is_number_unsigned() &&
                  v.get<long long>() < 0)
                throw ConfigError("seed", "expected a non-negative integer");
              cfg.seed = v.get<std::uint64_t>();
            },
            [](const SystemConfig& cfg) { return nlohmann::json(cfg.seed); }},
      Real("arrival_rate", &C::arrival_rate, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("horizon", &C::horizon, 0, Bound::kClosed, kInf, Bound::kOpen),
      Real("task_len_min", &C::task_len_min, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("task_len_max", &C::task_len_max, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("complexity_min", &C::complexity_min, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("complexity_max", &C::complexity_max, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("deadline_min", &C::deadline_min, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Real("deadline_max", &C::deadline_max, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Choice<LocalTimeMode>("local_time_mode", &C::local_time_mode,
                            {{"sampled", LocalTimeMode::kSampled},
                             {"derived", LocalTimeMode::kDerived}}),
      Real("local_time_min", &C::local_time_min, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("local_time_max", &C::local_time_max, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("local_speed", &C::local_speed, 0, Bound::kOpen, kInf, Bound::kOpen),
      Real("valuation_min", &C::valuation_min, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("valuation_max", &C::valuation_max, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("budget_min", &C::budget_min, 0, Bound::kClosed, kInf, Bound::kOpen),
      Real("budget_max", &C::budget_max, 0, Bound::kClosed, kInf, Bound::kOpen),
      Real("offload_prob", &C::offload_prob, 0, Bound::kClosed, 1,
           Bound::kClosed),
      Count("es_capacity", &C::es_capacity, 0),
      Real("availability_min", &C::availability_min, 0, Bound::kClosed, 1,
           Bound::kClosed),
      Real("availability_max", &C::availability_max, 0, Bound::kClosed, 1,
           Bound::kClosed),
      Real("reserve_price_min", &C::reserve_price_min, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("reserve_price_max", &C::reserve_price_max, 0, Bound::kClosed, kInf,
           Bound::kOpen),
      Real("unit_cost_ratio_min", &C::unit_cost_ratio_min, 0, Bound::kClosed,
           kInf, Bound::kOpen),
      Real("unit_cost_ratio_max", &C::unit_cost_ratio_max, 0, Bound::kClosed,
           kInf, Bound::kOpen),
      Real("speed_per_unit", &C::speed_per_unit, 0, Bound::kOpen, kInf,
           Bound::kOpen),
      Count("demand_max", &C::demand_max, 1),
      Real("slot_length", &C::slot_length, 0, Bound::kOpen, kInf, Bound::kOpen),
      Real("split_step", &C::split_step, 0, Bound::kOpen, 1, Bound::kClosed),
      Flag("count_local_success", &C::count_local_success),
      Real("valuation_grid_step", &C::valuation_grid_step, 0, Bound::kOpen,
           kInf, Bound::kOpen),
      Count("price_grid_points", &C::price_grid_points, 1),
      Real("trace_cycles_per_second", &C::trace_cycles_per_second, 0,
           Bound::kOpen, kInf, Bound::kOpen),
  };
  return fields;
}

void CheckOrdered(double lo, double hi, const char* lo_name,
                  const char* hi_name) {
  if (lo > hi)
    throw ConfigError(hi_name, std::string("must be >= ") + lo_name);
}

}  // namespace

SystemConfig ValidateConfig(const nlohmann::json& raw) {
  if (!raw.is_object())
    throw ConfigError("<document>", "expected a flat key-value object");
  SystemConfig cfg;
  for (const auto& [key, value] : raw.items()) {
    bool known = false;
    for (const auto& f : Fields()) {
      if (f.name == key) {
        f.read(cfg, value);
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError(key, "unknown key");
  }

  const double weight_sum = cfg.latency_weight + cfg.price_weight;
  if (!(weight_sum > 0))
    throw ConfigError("latency_weight",
                      "latency_weight + price_weight must be > 0");
  cfg.latency_weight /= weight_sum;
  cfg.price_weight = 1.0 - cfg.latency_weight;

  CheckOrdered(cfg.subchannel_min, cfg.subchannel_max, "subchannel_min",
               "subchannel_max");
  if (cfg.subchannel_max > cfg.num_subchannels)
    throw ConfigError("subchannel_max", "must be <= num_subchannels");
  CheckOrdered(cfg.task_len_min, cfg.task_len_max, "task_len_min",
               "task_len_max");
  CheckOrdered(cfg.complexity_min, cfg.complexity_max, "complexity_min",
               "complexity_max");
  CheckOrdered(cfg.deadline_min, cfg.deadline_max, "deadline_min",
               "deadline_max");
  CheckOrdered(cfg.local_time_min, cfg.local_time_max, "local_time_min",
               "local_time_max");
  CheckOrdered(cfg.valuation_min, cfg.valuation_max, "valuation_min",
               "valuation_max");
  CheckOrdered(cfg.budget_min, cfg.budget_max, "budget_min", "budget_max");
  CheckOrdered(cfg.availability_min, cfg.availability_max, "availability_min",
               "availability_max");
  CheckOrdered(cfg.reserve_price_min, cfg.reserve_price_max,
               "reserve_price_min", "reserve_price_max");
  CheckOrdered(cfg.unit_cost_ratio_min, cfg.unit_cost_ratio_max,
               "unit_cost_ratio_min", "unit_cost_ratio_max");

  return cfg;
}

nlohmann::json SerializeConfig(const SystemConfig& cfg) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& f : Fields()) out[f.name] = f.write(cfg);
  return out;
}

SystemConfig LoadConfigFile(const std::string& path) {
  if (path.empty()) return ValidateConfig(nlohmann::json::object());
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return ValidateConfig(doc);
}

bool operator==(const SystemConfig& a, const SystemConfig& b) {
  return SerializeConfig(a) == SerializeConfig(b);
}

}  // namespace offload
