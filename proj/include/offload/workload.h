// Synthetic Poisson workloads and grid-trace ingestion.

#ifndef OFFLOAD_WORKLOAD_H_
#define OFFLOAD_WORKLOAD_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "offload/model.h"

namespace offload {

enum class WorkloadSource { kSynthetic, kTrace };

struct Workload {
  std::vector<Task> tasks;  // arrival order
  WorkloadSource source = WorkloadSource::kSynthetic;
  double horizon = 0.0;
};

// Exponential inter-arrival times at cfg.arrival_rate until the horizon
// passes or cfg.num_tasks tasks exist. Owners are uniform over
// [0, num_owners).
Workload GenerateWorkload(const SystemConfig& cfg, std::uint64_t seed,
                          int num_owners);
Workload GenerateWorkload(const SystemConfig& cfg, std::uint64_t seed);

struct TraceRecord {
  std::string job_id;
  double submit_time = 0.0;
  double runtime = 0.0;
  int num_procs = 1;
};

inline constexpr const char* kTraceHeader =
    "job_id,submit_time,runtime,num_procs";

class TraceParseError : public std::runtime_error {
 public:
  TraceParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class EmptyWorkloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<TraceRecord> ParseTrace(std::istream& in);

// Runtime becomes task length through cfg.trace_cycles_per_second and the
// mean complexity; num_procs caps the demand. Records are kept in submit
// order and truncated to cfg.num_tasks. Deadlines, valuations and owners are
// drawn as for synthetic workloads.
Workload WorkloadFromTrace(const std::vector<TraceRecord>& records,
                           const SystemConfig& cfg, std::uint64_t seed,
                           int num_owners);
Workload LoadTrace(const std::string& path, const SystemConfig& cfg,
                   std::uint64_t seed = 1);

// Converts whitespace-separated archive logs (Standard Workload Format and
// the Grid Workload Format share the leading columns job, submit, wait,
// runtime, processors) to the four-column trace CSV. Comment lines start
// with ';' or '#'. Jobs with unknown runtime or processor count are
// dropped. Returns the number of records written.
int ConvertArchiveTrace(std::istream& in, std::ostream& out);

}  // namespace offload

#endif  // OFFLOAD_WORKLOAD_H_
