#include "offload/verify.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "offload/game.h"

namespace offload {

TruthfulnessResult VerifyNoProfitableDeviation(const AuctionInstance& instance,
                                               std::size_t i,
                                               double true_valuation,
                                               std::span<const double> grid,
                                               const SystemConfig& cfg,
                                               double slack) {
  TruthfulnessResult r;
  r.reference_payoff = EvaluateBuyerBid(
      instance, i, instance.bids[i].valuation, true_valuation, cfg);
  r.best_payoff = r.reference_payoff;
  for (double bid : grid) {
    const double p = EvaluateBuyerBid(instance, i, bid, true_valuation, cfg);
    if (p > r.best_payoff) r.best_payoff = p;
    if (p > r.reference_payoff + slack && !r.counterexample) {
      r.ok = false;
      r.counterexample = bid;
    }
  }
  return r;
}

TruthfulnessResult VerifyTruthfulness(const AuctionInstance& instance,
                                      std::size_t i, double true_valuation,
                                      std::span<const double> grid,
                                      const SystemConfig& cfg, double slack) {
  AuctionInstance truthful = instance;
  truthful.bids[i].valuation = true_valuation;
  return VerifyNoProfitableDeviation(truthful, i, true_valuation, grid, cfg,
                                     slack);
}

EnvyResult VerifyEnvyFree(const AuctionInstance& instance,
                          const AuctionOutcome& outcome,
                          std::span<const double> true_valuations,
                          const SystemConfig& cfg, EnvyReading reading) {
  EnvyResult r;
  const std::size_t n = instance.bids.size();
  for (std::size_t i = 0; i < n; ++i) {
    const BuyerBid& bi = instance.bids[i];
    if (!bi.participation) continue;
    const double own =
        BuyerPayoff(instance, outcome, i, true_valuations[i], cfg);
    const double tol = 1e-9 * std::max(1.0, std::abs(own));
    const double q = bi.offload_prob;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      double swapped = 0.0;
      if (reading == EnvyReading::kDeclarationSwap) {
        swapped = EvaluateBuyerBid(instance, i, instance.bids[k].valuation,
                                   true_valuations[i], cfg);
      } else {
        if (!outcome.IsWinner(k)) continue;
        const int server = outcome.allocation.server[k];
        const bool usable = instance.bids[k].demand >= bi.demand &&
                            instance.Eligible(i, server);
        const double value = usable ? bi.demand * true_valuations[i] : 0.0;
        const double pay = reading == EnvyReading::kBundleAtOthersPayment
                               ? outcome.payments[k]
                               : (outcome.IsWinner(i) ? outcome.payments[i]
                                                      : 0.0);
        const double cost = cfg.latency_weight * instance.Latency(i, server) +
                            cfg.price_weight * pay;
        swapped =
            q * (value - pay) - cfg.risk_weight * q * (1.0 - q) * cost * cost;
      }
      if (swapped > own + tol) {
        r.ok = false;
        r.envious = static_cast<int>(i);
        r.envied = static_cast<int>(k);
        return r;
      }
    }
  }
  return r;
}

double SellerContribution(const AuctionInstance& instance,
                          const Allocation& allocation, std::size_t j,
                          WinnerMode mode) {
  const auto values = DeclaredValues(instance);
  double with = 0.0;
  for (std::size_t i = 0; i < allocation.server.size(); ++i)
    if (allocation.server[i] != kUnassigned) with += values[i];
  AuctionInstance without = instance;
  without.asks[j].participation = false;
  return with - SolveAllocation(without, values, mode).welfare;
}

SharingResult VerifySharingIncentive(const AuctionInstance& instance,
                                     const AuctionOutcome& outcome,
                                     std::span<const Allocation> alternatives,
                                     const SystemConfig& cfg) {
  SharingResult r;
  for (std::size_t j = 0; j < instance.asks.size(); ++j) {
    if (!instance.asks[j].participation) continue;
    const double own =
        SellerContribution(instance, outcome.allocation, j, cfg.winner_mode);
    const double tol = 1e-9 * std::max(1.0, std::abs(own));
    if (own < -tol) {
      r = {false, static_cast<int>(j), -1};
      return r;
    }
    for (std::size_t a = 0; a < alternatives.size(); ++a) {
      const double alt =
          SellerContribution(instance, alternatives[a], j, cfg.winner_mode);
      if (alt > own + tol) {
        r = {false, static_cast<int>(j), static_cast<int>(a)};
        return r;
      }
    }
  }
  return r;
}

bool IsFeasible(const AuctionInstance& instance, const Allocation& allocation) {
  std::vector<int> load(instance.asks.size(), 0);
  for (std::size_t i = 0; i < allocation.server.size(); ++i) {
    const int s = allocation.server[i];
    if (s == kUnassigned) continue;
    if (s < 0 || s >= static_cast<int>(instance.asks.size()) ||
        !instance.Eligible(i, s))
      return false;
    load[s] += instance.bids[i].demand;
  }
  for (std::size_t j = 0; j < load.size(); ++j)
    if (load[j] > 0 && load[j] > instance.asks[j].available) return false;
  return true;
}

double ExhaustiveWelfare(const AuctionInstance& instance,
                         std::span<const double> values, int exclude) {
  const std::size_t n = instance.bids.size();
  std::vector<int> room(instance.asks.size());
  for (std::size_t j = 0; j < room.size(); ++j)
    room[j] = instance.asks[j].participation ? instance.asks[j].available : 0;
  double best = 0.0;
  std::vector<int> server(n, kUnassigned);
  // Depth-first over bids; each is left out or placed on a server with room.
  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      double w = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (server[k] != kUnassigned) w += values[k];
      best = std::max(best, w);
      return;
    }
    self(self, i + 1);
    if (static_cast<int>(i) == exclude) return;
    const int d = instance.bids[i].demand;
    for (std::size_t j = 0; j < room.size(); ++j) {
      if (!instance.Eligible(i, j) || room[j] < d) continue;
      room[j] -= d;
      server[i] = static_cast<int>(j);
      self(self, i + 1);
      server[i] = kUnassigned;
      room[j] += d;
    }
  };
  recurse(recurse, 0);
  return best;
}

namespace {

Allocation Finish(const AuctionInstance& instance, std::vector<int> server) {
  Allocation a;
  a.server = std::move(server);
  const auto values = DeclaredValues(instance);
  for (std::size_t i = 0; i < a.server.size(); ++i)
    if (a.server[i] != kUnassigned) a.welfare += values[i];
  return a;
}

std::vector<int> Residual(const AuctionInstance& instance) {
  std::vector<int> room(instance.asks.size());
  for (std::size_t j = 0; j < room.size(); ++j)
    room[j] = instance.asks[j].participation ? instance.asks[j].available : 0;
  return room;
}

}  // namespace

Allocation RandomFeasibleAllocation(const AuctionInstance& instance, Rng& rng) {
  std::vector<std::size_t> order(instance.bids.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto room = Residual(instance);
  std::vector<int> server(instance.bids.size(), kUnassigned);
  std::bernoulli_distribution take(0.5);
  for (std::size_t i : order) {
    if (!take(rng)) continue;
    std::vector<int> options;
    for (std::size_t j = 0; j < room.size(); ++j)
      if (instance.Eligible(i, j) && room[j] >= instance.bids[i].demand)
        options.push_back(static_cast<int>(j));
    if (options.empty()) continue;
    const int j = options[std::uniform_int_distribution<std::size_t>(
        0, options.size() - 1)(rng)];
    server[i] = j;
    room[j] -= instance.bids[i].demand;
  }
  return Finish(instance, std::move(server));
}

Allocation ProportionalShareAllocation(const AuctionInstance& instance) {
  std::vector<std::size_t> order(instance.bids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return instance.bids[a].demand < instance.bids[b].demand;
  });
  auto room = Residual(instance);
  std::vector<int> server(instance.bids.size(), kUnassigned);
  const std::size_t m = room.size();
  std::size_t next = 0;
  for (std::size_t i : order) {
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t j = (next + t) % m;
      if (instance.Eligible(i, j) && room[j] >= instance.bids[i].demand) {
        server[i] = static_cast<int>(j);
        room[j] -= instance.bids[i].demand;
        next = (j + 1) % m;
        break;
      }
    }
  }
  return Finish(instance, std::move(server));
}

Allocation LotteryAllocation(const AuctionInstance& instance, Rng& rng) {
  std::vector<std::size_t> order(instance.bids.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto room = Residual(instance);
  std::vector<int> server(instance.bids.size(), kUnassigned);
  for (std::size_t i : order) {
    for (std::size_t j = 0; j < room.size(); ++j) {
      if (instance.Eligible(i, j) && room[j] >= instance.bids[i].demand) {
        server[i] = static_cast<int>(j);
        room[j] -= instance.bids[i].demand;
        break;
      }
    }
  }
  return Finish(instance, std::move(server));
}

}  // namespace offload
