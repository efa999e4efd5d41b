#include "offload/radio.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace offload {

int Topology::ServingServer(int ue) const {
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < servers.size(); ++j) {
    const double d = Distance(ues[ue].position, servers[j].position);
    if (d <= servers[j].coverage_radius && d < best_dist) {
      best = static_cast<int>(j);
      best_dist = d;
    }
  }
  return best;
}

bool Topology::Covers(int es, int ue) const {
  return Distance(ues[ue].position, servers[es].position) <=
         servers[es].coverage_radius;
}

void ComputeCoverage(Topology& topology) {
  topology.coverage.assign(topology.servers.size(), {});
  for (std::size_t j = 0; j < topology.servers.size(); ++j)
    for (std::size_t i = 0; i < topology.ues.size(); ++i)
      if (topology.Covers(static_cast<int>(j), static_cast<int>(i)))
        topology.coverage[j].push_back(static_cast<int>(i));
  topology.serving.resize(topology.ues.size());
  for (std::size_t i = 0; i < topology.ues.size(); ++i)
    topology.serving[i] = topology.ServingServer(static_cast<int>(i));
}

Topology PlaceEntities(const SystemConfig& cfg, std::uint64_t seed) {
  const double area = cfg.region_side * cfg.region_side;
  if (!(area > 0)) throw GeometryError("region has zero area");

  Rng rng = MakeRng(seed, kPlacementStream);
  int n_ue = 0;
  int n_es = 0;
  if (cfg.placement == Placement::kFixed) {
    n_ue = cfg.num_ue;
    n_es = cfg.num_es;
  } else {
    n_ue = std::min(Poisson(rng, cfg.ue_intensity * area), cfg.num_ue);
    n_es = std::max(1, Poisson(rng, cfg.es_intensity * area));
  }

  Topology t;
  t.ues.resize(n_ue);
  for (int i = 0; i < n_ue; ++i) {
    auto& ue = t.ues[i];
    ue.id = i;
    ue.position = {Uniform(rng, 0, cfg.region_side),
                   Uniform(rng, 0, cfg.region_side)};
    ue.budget = Uniform(rng, cfg.budget_min, cfg.budget_max);
    ue.local_speed = cfg.local_speed;
    ue.offload_prob = cfg.offload_prob;
    ue.tx_power = cfg.TxPowerWatts();
  }
  t.servers.resize(n_es);
  for (int j = 0; j < n_es; ++j) {
    auto& es = t.servers[j];
    es.id = j;
    es.position = {Uniform(rng, 0, cfg.region_side),
                   Uniform(rng, 0, cfg.region_side)};
    es.capacity = cfg.es_capacity;
    es.available = static_cast<int>(std::lround(
        Uniform(rng, cfg.availability_min, cfg.availability_max) *
        cfg.es_capacity));
    es.reserve_price =
        Uniform(rng, cfg.reserve_price_min, cfg.reserve_price_max);
    es.unit_cost = es.reserve_price * Uniform(rng, cfg.unit_cost_ratio_min,
                                              cfg.unit_cost_ratio_max);
    es.speed_per_unit = cfg.speed_per_unit;
    es.coverage_radius = cfg.coverage_radius;
  }

  Rng fade = MakeRng(seed, kFadingStream);
  std::exponential_distribution<double> rayleigh(1.0);
  t.channel_gain.assign(n_ue, std::vector<double>(n_es, 0.0));
  for (int i = 0; i < n_ue; ++i) {
    for (int j = 0; j < n_es; ++j) {
      const double d =
          std::max(1.0, Distance(t.ues[i].position, t.servers[j].position));
      double h = rayleigh(fade);
      // Keep gains strictly positive.
      h = std::max(h, std::numeric_limits<double>::min());
      t.channel_gain[i][j] = std::pow(d, -cfg.pathloss_exponent) * h;
    }
  }

  ComputeCoverage(t);
  t.transmitting.assign(n_ue, true);
  t.subchannels = DrawSubchannels(t, cfg, seed).clamped;
  return t;
}

double SubchannelPmf(int n, double lambda_sc, double t) {
  const double x = lambda_sc * t;
  if (n < 0) return 0.0;
  if (x == 0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-x + n * std::log(x) - std::lgamma(n + 1.0));
}

double SubchannelRate(const SystemConfig& cfg, int n_ue_covered) {
  if (n_ue_covered <= 0)
    throw std::domain_error("sub-channel rate undefined for empty coverage");
  return static_cast<double>(cfg.num_subchannels) / n_ue_covered *
         cfg.mean_subchannel_request;
}

SubchannelDraw DrawSubchannels(const Topology& topology,
                               const SystemConfig& cfg, std::uint64_t seed) {
  constexpr double kEpoch = 1.0;
  Rng rng = MakeRng(seed, kSubchannelStream);
  SubchannelDraw out;
  out.raw.resize(topology.ues.size(), 0);
  out.clamped.resize(topology.ues.size(), cfg.subchannel_min);
  for (std::size_t i = 0; i < topology.ues.size(); ++i) {
    const int es = topology.ServingServer(static_cast<int>(i));
    if (es < 0) continue;
    const int covered = static_cast<int>(topology.coverage[es].size());
    const double lambda = SubchannelRate(cfg, covered);
    out.raw[i] = Poisson(rng, lambda * kEpoch);
    out.clamped[i] =
        std::clamp(out.raw[i], cfg.subchannel_min, cfg.subchannel_max);
  }
  return out;
}

double Sinr(int ue, int es, const Topology& topology, const SystemConfig& cfg) {
  const double signal =
      topology.ues[ue].tx_power * topology.channel_gain[ue][es];
  const bool cells = topology.serving.size() == topology.ues.size();
  const int cell = cells ? topology.serving[ue] : -1;
  double interference = 0.0;
  for (std::size_t k = 0; k < topology.ues.size(); ++k) {
    if (static_cast<int>(k) == ue || !topology.transmitting[k]) continue;
    if (cell >= 0 && topology.serving[k] == cell) continue;
    interference += topology.ues[k].tx_power * topology.channel_gain[k][es];
  }
  return signal / (interference + cfg.NoiseVariance());
}

double TransmissionRate(int ue, int es, const Topology& topology,
                        const SystemConfig& cfg) {
  const double share = topology.subchannels[ue] * cfg.bandwidth /
                       static_cast<double>(cfg.num_subchannels);
  return share * std::log2(1.0 + Sinr(ue, es, topology, cfg));
}

double ExpectedRate(int ue, int es, const Topology& topology,
                    const SystemConfig& cfg) {
  const double per_subchannel =
      cfg.bandwidth / static_cast<double>(cfg.num_subchannels);
  return topology.ues[ue].offload_prob *
         (topology.subchannels[ue] * per_subchannel *
          std::log2(1.0 + Sinr(ue, es, topology, cfg)));
}

double TransmissionTime(double split, double len, double rate) {
  if (split <= 0) return 0.0;
  if (!(rate > 0)) throw std::domain_error("server unreachable: zero rate");
  return 2.0 * split * len / rate;
}

double RemoteProcessingTime(double split, const Task& task, int allocated_units,
                            const EdgeServer& es) {
  if (split <= 0) return 0.0;
  if (allocated_units <= 0)
    throw std::domain_error("offloaded work with no allocated resources");
  return task.complexity * split * task.len /
         (allocated_units * es.speed_per_unit);
}

double LocalProcessingTime(double split, const Task& task,
                           const UserEquipment& ue) {
  const double local = 1.0 - split;
  if (local <= 0) return 0.0;
  if (task.local_time) return *task.local_time * local;
  return local * task.complexity * task.len / ue.local_speed;
}

LatencyBreakdown ComputeLatency(const Task& task, const UserEquipment& ue,
                                const EdgeServer& es, int allocated_units,
                                double rate, const SystemConfig& cfg) {
  LatencyBreakdown b;
  b.tx_time = TransmissionTime(task.split, task.len, rate);
  b.remote_proc = RemoteProcessingTime(task.split, task, allocated_units, es);
  b.local_proc = LocalProcessingTime(task.split, task, ue);
  b.offload_total = b.tx_time + b.remote_proc;
  b.local_total = b.local_proc;
  b.total = cfg.execution_mode == ExecutionMode::kConcurrent
                ? std::max(b.offload_total, b.local_total)
                : b.offload_total + b.local_total;
  return b;
}

void WriteTopologyCsv(const Topology& topology, std::ostream& out) {
  out << "entity_type,id,x_m,y_m,n_sc\n" << std::setprecision(10);
  for (std::size_t i = 0; i < topology.ues.size(); ++i) {
    const auto& ue = topology.ues[i];
    out << "ue," << ue.id << ',' << ue.position.x << ',' << ue.position.y
        << ',' << topology.subchannels[i] << '\n';
  }
  for (const auto& es : topology.servers)
    out << "es," << es.id << ',' << es.position.x << ',' << es.position.y
        << ",0\n";
}

void WriteChannelCsv(const Topology& topology, std::ostream& out) {
  out << std::setprecision(10);
  for (const auto& row : topology.channel_gain) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

}  // namespace offload
