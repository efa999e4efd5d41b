// Best responses over finite strategy grids and the round-robin equilibrium
// loop for the offloading auction.

#ifndef OFFLOAD_GAME_H_
#define OFFLOAD_GAME_H_

#include <ostream>
#include <span>
#include <vector>

#include "offload/auction.h"
#include "offload/model.h"

namespace offload {

// Candidate valuations (buyers) and reserve prices (sellers).
struct BestResponseGrid {
  std::vector<double> valuations;
  std::vector<double> prices;

  // Throws std::invalid_argument unless both lists are non-empty and
  // strictly increasing.
  void Validate() const;
};

// lo, lo + step, ... up to hi (hi included when on the lattice).
std::vector<double> LinearGrid(double lo, double hi, double step);
// `points` evenly spaced values from lo to hi inclusive.
std::vector<double> EvenGrid(double lo, double hi, int points);

// Valuation grid from the configured valuation range and step, price grid
// over the reserve-price range.
BestResponseGrid MakeGrid(const SystemConfig& cfg);

// Offload iff the summed valuations reach the summed reserve prices.
bool OffloadDecision(std::span<const double> valuations,
                     std::span<const double> prices);

struct EquilibriumState {
  AuctionInstance instance;         // current declared bids and asks
  std::vector<double> true_values;  // per bid, true valuation per unit
  BestResponseGrid grid;
};

struct RoundResult {
  AuctionOutcome outcome;
  std::vector<double> buyer_payoffs;
  std::vector<double> seller_payoffs;
  double welfare = 0.0;
  // Sum over winners of w1 * latency + w2 * payment.
  double total_cost = 0.0;
};

// Sellers pricing below their unit cost sit out; then one auction with
// payments, payoffs and welfare.
RoundResult RunAuctionRound(const EquilibriumState& state,
                            const SystemConfig& cfg);

// Payoff of bidder i (true valuation `true_value`) when declaring `bid`,
// everything else in `instance` fixed. Skips the payments of other winners
// when no budget can bind.
double EvaluateBuyerBid(const AuctionInstance& instance, std::size_t i,
                        double bid, double true_value, const SystemConfig& cfg);

struct Response {
  double choice = 0.0;          // best grid point, smallest on ties
  double best_payoff = 0.0;
  double current_payoff = 0.0;  // payoff of the current declaration
};

// kAuto searches the grid by bisection when the allocation is exact and no
// budget can bind; kFull always evaluates every grid point.
enum class GridSearch { kAuto, kFull };

Response BestResponseBuyer(const EquilibriumState& state, std::size_t i,
                           const SystemConfig& cfg,
                           GridSearch search = GridSearch::kAuto);
Response BestResponseSeller(const EquilibriumState& state, std::size_t j,
                            const SystemConfig& cfg);

struct Fulfillment {
  bool user_fulfilled = false;    // every buyer that should offload won
  bool server_fulfilled = false;  // every available unit was sold
};

struct EquilibriumReport {
  int iterations = 0;
  std::vector<std::vector<double>> bid_trace;    // per sweep, per bid
  std::vector<std::vector<double>> price_trace;  // per sweep, per ask
  std::vector<double> cost_trace;
  std::vector<double> welfare_trace;
  std::vector<double> max_gain_trace;
  double initial_cost = 0.0;
  bool converged = false;
  double epsilon = 0.0;
  Fulfillment fulfillment;
  RoundResult final_round;
};

// Round-robin best responses, buyers then sellers. A player moves only when
// its gain exceeds epsilon. Converged once a sweep moves nobody and the
// total cost has changed by less than epsilon for `stable_sweeps`
// consecutive sweeps. Throws std::invalid_argument when epsilon <= 0,
// max_iter < 1 or stable_sweeps < 1.
EquilibriumReport RunToEquilibrium(EquilibriumState& state,
                                   const SystemConfig& cfg, double epsilon,
                                   int max_iter, int stable_sweeps = 1);

Fulfillment CheckFulfillment(const EquilibriumState& state,
                             const RoundResult& round);

// iteration,total_cost,welfare,max_deviation_gain
void WriteEquilibriumCsv(const EquilibriumReport& report, std::ostream& out);

}  // namespace offload

#endif  // OFFLOAD_GAME_H_
