// Property checks for the auction: truthfulness over a misreport grid,
// pairwise envy-freeness and the sharing-incentive comparison against
// alternative allocations, plus generators for those alternatives.

#ifndef OFFLOAD_VERIFY_H_
#define OFFLOAD_VERIFY_H_

#include <optional>
#include <span>
#include <vector>

#include "offload/auction.h"
#include "offload/model.h"
#include "offload/rng.h"

namespace offload {

struct TruthfulnessResult {
  bool ok = true;
  std::optional<double> counterexample;  // a strictly better misreport
  double reference_payoff = 0.0;
  double best_payoff = 0.0;
};

// Bidder i declares its true valuation, everyone else as in `instance`.
// Fails when some grid misreport pays more than `slack` above truth.
TruthfulnessResult VerifyTruthfulness(const AuctionInstance& instance,
                                      std::size_t i, double true_valuation,
                                      std::span<const double> grid,
                                      const SystemConfig& cfg,
                                      double slack = 0.0);

// Same comparison against bidder i's current declaration.
TruthfulnessResult VerifyNoProfitableDeviation(const AuctionInstance& instance,
                                               std::size_t i,
                                               double true_valuation,
                                               std::span<const double> grid,
                                               const SystemConfig& cfg,
                                               double slack = 0.0);

// What bidder i is offered when it covets bidder k's position.
//   kDeclarationSwap: i declares k's valuation and takes what the mechanism
//     then allocates and charges it.
//   kBundleAtOthersPayment: i takes k's bundle and pays k's payment.
//   kBundleAtOwnPayment: i takes k's bundle and keeps its own payment.
// A bundle is worth d_i v_i to i when it is at least as large as i's demand
// and sits on a server i may use, else nothing.
enum class EnvyReading {
  kDeclarationSwap,
  kBundleAtOthersPayment,
  kBundleAtOwnPayment
};

struct EnvyResult {
  bool ok = true;
  int envious = -1;
  int envied = -1;
};

// Envy is a swap paying i strictly more than its own outcome. Bundle
// readings compare winners' bundles; the declaration swap also lets i mimic
// losers.
EnvyResult VerifyEnvyFree(
    const AuctionInstance& instance, const AuctionOutcome& outcome,
    std::span<const double> true_valuations, const SystemConfig& cfg,
    EnvyReading reading = EnvyReading::kDeclarationSwap);

struct SharingResult {
  bool ok = true;
  int es = -1;           // violating seller
  int alternative = -1;  // index of the violating alternative, -1 for the
                         // non-negativity check
};

// A seller's payoff under an allocation is its marginal contribution: the
// declared welfare of that allocation minus the best welfare attainable
// without the seller. Checks non-negativity under `outcome` and that no
// alternative pays any seller more.
SharingResult VerifySharingIncentive(const AuctionInstance& instance,
                                     const AuctionOutcome& outcome,
                                     std::span<const Allocation> alternatives,
                                     const SystemConfig& cfg);

double SellerContribution(const AuctionInstance& instance,
                          const Allocation& allocation, std::size_t j,
                          WinnerMode mode);

// Best welfare over every assignment of bids to servers, by enumeration.
// Intended for instances with a handful of bids.
double ExhaustiveWelfare(const AuctionInstance& instance,
                         std::span<const double> values, int exclude = -1);

// True when every winner is eligible for its server and no server is
// oversubscribed.
bool IsFeasible(const AuctionInstance& instance, const Allocation& allocation);

// Bids in random order, each on a random eligible server with room, or
// skipped with probability 1/2.
Allocation RandomFeasibleAllocation(const AuctionInstance& instance, Rng& rng);
// Smallest demands first, round-robin over servers.
Allocation ProportionalShareAllocation(const AuctionInstance& instance);
// Bids in random order, each on the first eligible server with room.
Allocation LotteryAllocation(const AuctionInstance& instance, Rng& rng);

}  // namespace offload

#endif  // OFFLOAD_VERIFY_H_
