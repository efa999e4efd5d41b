#include <fstream>
#include <iomanip>
#include <locale>

#include "offload/harness.h"

namespace offload {

void EmitCsv(std::span<const MetricsRow> rows, std::ostream& out) {
  out.imbue(std::locale::classic());
  out << kMetricsHeader << '\n' << std::setprecision(10);
  for (const MetricsRow& r : rows) {
    out << r.scenario << ',' << r.method << ',' << r.param << ','
        << r.param_value << ',' << r.seed << ',' << r.num_tasks << ','
        << r.num_ues << ',' << r.social_welfare << ',' << r.success_rate << ','
        << r.mean_latency << ',' << r.runtime_ms << ','
        << r.iterations_to_converge << ',' << r.oversupply << ','
        << r.unmet_demand << ',' << r.payoff << ',' << r.total_cost << '\n';
  }
}

void EmitCsv(std::span<const MetricsRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  EmitCsv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace offload
