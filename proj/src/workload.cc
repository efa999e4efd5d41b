#include "offload/workload.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "offload/rng.h"

namespace offload {

namespace {

// Fills everything but arrival time, length and demand cap.
void DrawAttributes(Task& t, const SystemConfig& cfg, Rng& rng,
                    int num_owners) {
  t.complexity = Uniform(rng, cfg.complexity_min, cfg.complexity_max);
  t.deadline = Uniform(rng, cfg.deadline_min, cfg.deadline_max);
  if (cfg.local_time_mode == LocalTimeMode::kSampled)
    t.local_time = Uniform(rng, cfg.local_time_min, cfg.local_time_max);
  t.valuation = Uniform(rng, cfg.valuation_min, cfg.valuation_max);
  t.owner_ue = num_owners > 0
                   ? std::uniform_int_distribution<int>(0, num_owners - 1)(rng)
                   : 0;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <typename T>
T ParseNumber(const std::string& text, int line, const char* field) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw TraceParseError(line, std::string("bad ") + field + " '" + text + "'");
  return value;
}

}  // namespace

Workload GenerateWorkload(const SystemConfig& cfg, std::uint64_t seed,
                          int num_owners) {
  Rng rng = MakeRng(seed, kWorkloadStream);
  std::exponential_distribution<double> gap(cfg.arrival_rate);
  Workload w;
  w.horizon = cfg.EffectiveHorizon();
  double t = 0.0;
  while (static_cast<int>(w.tasks.size()) < cfg.num_tasks) {
    t += gap(rng);
    if (t > w.horizon) break;
    Task task;
    task.id = static_cast<int>(w.tasks.size());
    task.arrival_time = t;
    task.len = Uniform(rng, cfg.task_len_min, cfg.task_len_max);
    DrawAttributes(task, cfg, rng, num_owners);
    w.tasks.push_back(task);
  }
  return w;
}

Workload GenerateWorkload(const SystemConfig& cfg, std::uint64_t seed) {
  return GenerateWorkload(cfg, seed, cfg.num_ue);
}

std::vector<TraceRecord> ParseTrace(std::istream& in) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw EmptyWorkloadError("trace is empty");
  ++line_no;
  if (Trim(line) != kTraceHeader)
    throw TraceParseError(line_no, std::string("expected header '") +
                                       kTraceHeader + "'");
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCsv(line);
    if (cells.size() != 4)
      throw TraceParseError(line_no, "expected 4 columns, got " +
                                         std::to_string(cells.size()));
    TraceRecord r;
    r.job_id = Trim(cells[0]);
    if (r.job_id.empty()) throw TraceParseError(line_no, "empty job_id");
    r.submit_time = ParseNumber<double>(Trim(cells[1]), line_no, "submit_time");
    r.runtime = ParseNumber<double>(Trim(cells[2]), line_no, "runtime");
    r.num_procs = ParseNumber<int>(Trim(cells[3]), line_no, "num_procs");
    if (!(r.runtime > 0))
      throw TraceParseError(line_no, "runtime must be > 0 (job " + r.job_id +
                                         ")");
    if (r.num_procs < 1)
      throw TraceParseError(line_no, "num_procs must be >= 1 (job " +
                                         r.job_id + ")");
    if (!std::isfinite(r.submit_time) || r.submit_time < 0)
      throw TraceParseError(line_no, "submit_time must be >= 0");
    records.push_back(std::move(r));
  }
  if (records.empty()) throw EmptyWorkloadError("trace has no records");
  return records;
}

Workload WorkloadFromTrace(const std::vector<TraceRecord>& records,
                           const SystemConfig& cfg, std::uint64_t seed,
                           int num_owners) {
  if (records.empty()) throw EmptyWorkloadError("trace has no records");
  std::vector<const TraceRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) {
    return a->submit_time < b->submit_time;
  });
  if (static_cast<int>(sorted.size()) > cfg.num_tasks)
    sorted.resize(cfg.num_tasks);

  Rng rng = MakeRng(seed, kWorkloadStream);
  const double start = sorted.front()->submit_time;
  Workload w;
  w.source = WorkloadSource::kTrace;
  for (const TraceRecord* r : sorted) {
    Task task;
    task.id = static_cast<int>(w.tasks.size());
    task.arrival_time = r->submit_time - start;
    DrawAttributes(task, cfg, rng, num_owners);
    task.len = r->runtime * cfg.trace_cycles_per_second / task.complexity;
    task.demand_cap = r->num_procs;
    w.tasks.push_back(task);
  }
  w.horizon = w.tasks.back().arrival_time;
  return w;
}

Workload LoadTrace(const std::string& path, const SystemConfig& cfg,
                   std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path);
  return WorkloadFromTrace(ParseTrace(in), cfg, seed, cfg.num_ue);
}

int ConvertArchiveTrace(std::istream& in, std::ostream& out) {
  out << kTraceHeader << '\n' << std::setprecision(12);
  std::string line;
  int written = 0;
  while (std::getline(in, line)) {
    const std::string t = Trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    std::istringstream fields(t);
    std::string job;
    double submit = 0, wait = 0, runtime = 0, procs = 0;
    if (!(fields >> job >> submit >> wait >> runtime >> procs)) continue;
    if (!(runtime > 0) || procs < 1 || submit < 0) continue;
    out << job << ',' << submit << ',' << runtime << ','
        << static_cast<int>(procs) << '\n';
    ++written;
  }
  return written;
}

}  // namespace offload
