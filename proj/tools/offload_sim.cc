// Command-line front end: scenario runs, parameter sweeps, property suites
// and trace conversion.
//
// Exit codes: 0 success, 1 property violation, 2 usage or input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "offload/auction.h"
#include "offload/harness.h"
#include "offload/verify.h"
#include "offload/workload.h"

namespace {

using namespace offload;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr const char* kConfigEnv = "OFFLOAD_CONFIG";

// "a..b" (inclusive), "a,b,c" or a single seed.
std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (text.empty()) return seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("seed range " + text + " is empty");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
  return seeds;
}

SystemConfig ResolveConfig(const std::string& flag_path) {
  std::string path = flag_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  return LoadConfigFile(path);
}

void Write(const std::vector<MetricsRow>& rows, const std::string& out) {
  if (out.empty() || out == "-")
    EmitCsv(rows, std::cout);
  else
    EmitCsv(rows, out);
}

int VerifySuite(const std::string& suite, int instances, std::uint64_t seed,
                WinnerMode mode) {
  SystemConfig cfg;
  cfg.winner_mode = mode;
  Rng rng = MakeRng(seed, kScenarioStream);
  int violations = 0;
  auto report = [&](int n, const std::string& what) {
    ++violations;
    std::cerr << "instance " << n << ": " << what << '\n';
  };
  for (int n = 0; n < instances; ++n) {
    RandomInstanceSpec spec;
    if (suite == "truthfulness") {
      spec.max_bids = 4;
      const AuctionInstance in = RandomInstance(rng, spec);
      std::vector<double> grid;
      for (int k = 1; k <= spec.valuation_points; ++k) grid.push_back(10.0 * k);
      for (std::size_t i = 0; i < in.bids.size(); ++i) {
        const auto r =
            VerifyTruthfulness(in, i, in.bids[i].valuation, grid, cfg);
        if (!r.ok)
          report(n, "bidder " + std::to_string(i) + " gains by bidding " +
                        std::to_string(*r.counterexample));
      }
    } else if (suite == "envy") {
      spec.max_bids = 8;
      const AuctionInstance in = RandomInstance(rng, spec);
      const auto out = RunAuction(in, cfg);
      std::vector<double> truth;
      for (const auto& b : in.bids) truth.push_back(b.valuation);
      const auto r = VerifyEnvyFree(in, out, truth, cfg);
      if (!r.ok)
        report(n, "bidder " + std::to_string(r.envious) + " envies " +
                      std::to_string(r.envied));
    } else if (suite == "incentive") {
      spec.max_bids = 8;
      const AuctionInstance in = RandomInstance(rng, spec);
      const auto out = RunAuction(in, cfg);
      std::vector<Allocation> alts;
      for (int a = 0; a < 50; ++a) alts.push_back(RandomFeasibleAllocation(in, rng));
      alts.push_back(ProportionalShareAllocation(in));
      alts.push_back(LotteryAllocation(in, rng));
      const auto r = VerifySharingIncentive(in, out, alts, cfg);
      if (!r.ok)
        report(n, "seller " + std::to_string(r.es) + " prefers alternative " +
                      std::to_string(r.alternative));
      spec.full_offload = true;
      const AuctionInstance full = RandomInstance(rng, spec);
      const auto alloc = DetermineWinners(full, cfg.winner_mode);
      for (int i : AuctionOutcome{alloc, {}, {}, {}, {}, 0}.Winners()) {
        double previous = IncentivePayment(full, alloc, i, 0.0, cfg.winner_mode);
        for (int step = 1; step <= 5; ++step) {
          const double p =
              IncentivePayment(full, alloc, i, 0.1 * step, cfg.winner_mode);
          if (p > previous) report(n, "payment rises with the incentive factor");
          previous = p;
        }
      }
    } else if (suite == "oracle") {
      spec.max_bids = 6;
      const AuctionInstance in = RandomInstance(rng, spec);
      const auto values = DeclaredValues(in);
      const auto exact = SolveAllocation(in, values, WinnerMode::kExact);
      if (exact.welfare != ExhaustiveWelfare(in, values) ||
          !IsFeasible(in, exact))
        report(n, "exact allocation differs from enumeration");
    } else {
      throw CLI::ValidationError("--suite", "unknown suite " + suite);
    }
  }
  std::cout << suite << ": " << instances << " instances, " << violations
            << " violations\n";
  return violations ? kViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge offloading auction simulator"};
  app.require_subcommand(1);

  std::string config_path, seeds_text = "1", out_path, trace_path;
  bool record_runtime = false;

  auto* run = app.add_subcommand("run", "Run a registered scenario");
  std::string scenario;
  run->add_option("--scenario", scenario, "Scenario name")->required();
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--seeds", seeds_text, "Seeds: a..b, a,b,c or a");
  run->add_option("--out", out_path, "Output CSV (default stdout)");
  run->add_option("--trace-out", trace_path, "Equilibrium trace CSV");
  run->add_flag("--record-runtime", record_runtime,
                "Report wall-clock auction time (not reproducible)");

  auto* sweep = app.add_subcommand("sweep", "Sweep one config key");
  std::string param, values_text, sweep_scenario = "pipeline";
  sweep->add_option("--param", param, "Config key")->required();
  sweep->add_option("--values", values_text, "Comma-separated values")
      ->required();
  sweep->add_option("--scenario", sweep_scenario, "Scenario per value");
  sweep->add_option("--config", config_path, "JSON config file");
  sweep->add_option("--seeds", seeds_text, "Seeds: a..b, a,b,c or a");
  sweep->add_option("--out", out_path, "Output CSV (default stdout)");

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  std::string suite;
  int instances = 200;
  std::uint64_t verify_seed = 1;
  verify->add_option("--suite", suite, "Suite")
      ->required()
      ->check(CLI::IsMember({"truthfulness", "envy", "incentive", "oracle"}));
  verify->add_option("--instances", instances, "Random instances")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "Generator seed");
  std::string verify_mode = "exact";
  verify->add_option("--winner-mode", verify_mode, "exact or greedy")
      ->check(CLI::IsMember({"exact", "greedy"}));

  auto* trace = app.add_subcommand("trace", "Trace utilities");
  trace->require_subcommand(1);
  auto* convert =
      trace->add_subcommand("convert", "Archive log to the trace CSV");
  std::string trace_in, trace_out;
  convert->add_option("--in", trace_in, "SWF/GWF log")->required();
  convert->add_option("--out", trace_out, "Trace CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      ScenarioContext ctx;
      ctx.cfg = ResolveConfig(config_path);
      ctx.seeds = ParseSeeds(seeds_text);
      ctx.record_runtime = record_runtime;
      std::ofstream trace_file;
      if (!trace_path.empty()) {
        trace_file.open(trace_path, std::ios::binary);
        if (!trace_file) throw std::runtime_error("cannot write " + trace_path);
        ctx.trace_out = &trace_file;
      }
      Write(RunScenario(scenario, ctx), out_path);
      return kOk;
    }
    if (*sweep) {
      const SystemConfig base = ResolveConfig(config_path);
      std::vector<MetricsRow> rows;
      std::stringstream ss(values_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        nlohmann::json raw = SerializeConfig(base);
        if (!raw.contains(param))
          throw ConfigError(param, "unknown key");
        nlohmann::json value;
        double numeric = 0.0;
        try {
          value = nlohmann::json::parse(item);
          if (value.is_number()) numeric = value.get<double>();
        } catch (const nlohmann::json::parse_error&) {
          value = item;
        }
        raw[param] = value;
        ScenarioContext ctx;
        ctx.cfg = ValidateConfig(raw);
        ctx.seeds = ParseSeeds(seeds_text);
        for (MetricsRow& row : RunScenario(sweep_scenario, ctx)) {
          if (row.param.empty()) {
            row.param = param;
            row.param_value = numeric;
          }
          rows.push_back(std::move(row));
        }
      }
      Write(rows, out_path);
      return kOk;
    }
    if (*verify) return VerifySuite(suite, instances, verify_seed,
                         verify_mode == "greedy" ? WinnerMode::kGreedy
                                                 : WinnerMode::kExact);
    if (*convert) {
      std::ifstream in(trace_in);
      if (!in) throw std::runtime_error("cannot open " + trace_in);
      std::ofstream out(trace_out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + trace_out);
      const int n = ConvertArchiveTrace(in, out);
      std::cerr << n << " records written\n";
      return kOk;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
