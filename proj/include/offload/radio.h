// Network geometry, channel model, sub-channel allocation and the latency
// model for partially offloaded tasks.

#ifndef OFFLOAD_RADIO_H_
#define OFFLOAD_RADIO_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "offload/model.h"
#include "offload/rng.h"

namespace offload {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// UE and ES populations with their channel state. Entity ids equal their
// index in `ues` / `servers`.
struct Topology {
  std::vector<UserEquipment> ues;
  std::vector<EdgeServer> servers;
  // |h_kj|^2, indexed [ue][es].
  std::vector<std::vector<double>> channel_gain;
  // Sub-channels held by each UE.
  std::vector<int> subchannels;
  // UE ids inside each server's coverage disk.
  std::vector<std::vector<int>> coverage;
  // Serving server per UE, -1 when uncovered.
  std::vector<int> serving;
  // UEs currently sending data; only these interfere.
  std::vector<bool> transmitting;

  // Nearest server whose disk covers the UE, or -1.
  int ServingServer(int ue) const;
  bool Covers(int es, int ue) const;
};

// Draws UE and ES positions from homogeneous Poisson processes over the
// square region (or exactly num_ue / num_es points in fixed placement),
// their attributes, and pathloss-times-Rayleigh channel gains.
Topology PlaceEntities(const SystemConfig& cfg, std::uint64_t seed);

// Recomputes coverage sets and serving servers from positions and radii.
void ComputeCoverage(Topology& topology);

// Poisson probability of holding n sub-channels after time t.
double SubchannelPmf(int n, double lambda_sc, double t);

// Allocation rate (N_sc / N_UE) * mu. Throws std::domain_error when the
// coverage is empty.
double SubchannelRate(const SystemConfig& cfg, int n_ue_covered);

struct SubchannelDraw {
  std::vector<int> raw;      // unclamped Poisson draws
  std::vector<int> clamped;  // within [subchannel_min, subchannel_max]
};

// Per-UE sub-channel counts drawn from the serving server's Poisson law over
// one scheduling epoch. Uncovered UEs get a raw draw of 0.
SubchannelDraw DrawSubchannels(const Topology& topology,
                               const SystemConfig& cfg, std::uint64_t seed);

// Interference comes from transmitting UEs outside the sender's cell; UEs
// of one cell hold disjoint sub-channels.
double Sinr(int ue, int es, const Topology& topology, const SystemConfig& cfg);

// Shannon rate over the UE's n_sc * W / N_sc share of the band, bits/s.
double TransmissionRate(int ue, int es, const Topology& topology,
                        const SystemConfig& cfg);

// Offload-probability-weighted rate: q * n_sc * (W / N_sc) * log2(1 + SINR).
double ExpectedRate(int ue, int es, const Topology& topology,
                    const SystemConfig& cfg);

// Round trip (uplink plus downlink at the same rate) of split * len bits.
// Throws std::domain_error when split > 0 and the rate is zero.
double TransmissionTime(double split, double len, double rate);

// Cycles of the offloaded part over the allocated compute rate. Throws
// std::domain_error when split > 0 and nothing is allocated.
double RemoteProcessingTime(double split, const Task& task, int allocated_units,
                            const EdgeServer& es);

// Local share of the task; sampled local time when the task has one,
// otherwise derived from the UE's speed.
double LocalProcessingTime(double split, const Task& task,
                           const UserEquipment& ue);

struct LatencyBreakdown {
  double tx_time = 0.0;
  double remote_proc = 0.0;
  double local_proc = 0.0;
  double offload_total = 0.0;
  double local_total = 0.0;
  double total = 0.0;
};

// Latency of `task` at its own split, sending at `rate` bits/s to `es`.
LatencyBreakdown ComputeLatency(const Task& task, const UserEquipment& ue,
                                const EdgeServer& es, int allocated_units,
                                double rate, const SystemConfig& cfg);

// entity_type,id,x_m,y_m,n_sc
void WriteTopologyCsv(const Topology& topology, std::ostream& out);
// Row-major |h|^2 matrix, one UE per line.
void WriteChannelCsv(const Topology& topology, std::ostream& out);

}  // namespace offload

#endif  // OFFLOAD_RADIO_H_
