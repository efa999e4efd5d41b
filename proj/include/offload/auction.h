// VCG task-offloading auction: sealed bids from UEs, asks from edge servers,
// welfare-maximizing winner determination, Clarke pivot payments (optionally
// discounted by offloaded size), seller income, payoffs and welfare.

#ifndef OFFLOAD_AUCTION_H_
#define OFFLOAD_AUCTION_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "offload/model.h"

namespace offload {

struct BuyerBid {
  int ue_id = 0;
  int demand = 1;          // resource units
  double valuation = 0.0;  // declared value per unit
  double deadline = 0.0;   // seconds
  double budget = 0.0;
  bool participation = true;
  double split = 1.0;         // offloaded fraction, drives the incentive discount
  double offload_prob = 1.0;  // q_i
};

struct SellerAsk {
  int es_id = 0;
  int resource = 0;  // total units S_j
  double reserve_price = 0.0;
  int available = 0;
  double unit_cost = 0.0;
  bool participation = true;
  double offload_prob = 1.0;  // q_j
};

// One sealed-bid auction. `link` and `latency` are optional [bid][ask]
// matrices; when empty every pair is linked with zero offload latency.
struct AuctionInstance {
  std::vector<BuyerBid> bids;
  std::vector<SellerAsk> asks;
  std::vector<std::vector<std::uint8_t>> link;
  std::vector<std::vector<double>> latency;

  // Bid i may be served by ask j: both participate, the pair is linked, the
  // demand fits the server and its reserve price fits the budget.
  bool Eligible(std::size_t i, std::size_t j) const;
  double Latency(std::size_t i, std::size_t j) const;
};

inline constexpr int kUnassigned = -1;

struct Allocation {
  std::vector<int> server;  // per bid; kUnassigned for losers
  double welfare = 0.0;     // sum of the winners' terms, bid order
};

// Declared value d_i * v_i of every bid.
std::vector<double> DeclaredValues(const AuctionInstance& instance);

// Terms (1 - lambda * split_i) * d_i * v_i. lambda = 0 gives DeclaredValues
// exactly.
std::vector<double> DiscountedValues(const AuctionInstance& instance,
                                     double lambda);

// Priority used for tie-breaking and greedy packing: higher per-unit value,
// then tighter deadline, then lower ue id, then lower index.
std::vector<std::size_t> PriorityOrder(const AuctionInstance& instance,
                                       std::span<const double> values);

// Maximizes the sum of `values` over winners, each winner on exactly one
// eligible server, per-server demand within availability. `exclude` removes
// one bid from consideration.
Allocation SolveAllocation(const AuctionInstance& instance,
                           std::span<const double> values, WinnerMode mode,
                           int exclude = kUnassigned);

Allocation DetermineWinners(const AuctionInstance& instance, WinnerMode mode);

struct AuctionOutcome {
  Allocation allocation;
  std::vector<double> payments;  // per bid, 0 for losers
  std::vector<double> incomes;   // per ask
  std::vector<int> units_sold;   // per ask
  std::vector<int> demoted;      // bids dropped for exceeding their budget
  double declared_welfare = 0.0;

  std::vector<int> Winners() const;
  bool IsWinner(std::size_t i) const {
    return allocation.server[i] != kUnassigned;
  }
};

// Others' welfare without i minus others' welfare in `allocation`, using
// `values` for every term. Throws std::domain_error when i is not a winner.
double PivotPayment(const AuctionInstance& instance,
                    const Allocation& allocation, std::size_t i,
                    std::span<const double> values, WinnerMode mode);

double ClarkePayment(const AuctionInstance& instance,
                     const Allocation& allocation, std::size_t i,
                     WinnerMode mode);

// Pivot with discounted terms. Throws std::invalid_argument unless
// 0 <= lambda < 1.
double IncentivePayment(const AuctionInstance& instance,
                        const Allocation& allocation, std::size_t i,
                        double lambda, WinnerMode mode);

// Winner determination plus payments under cfg.winner_mode and
// cfg.payment_rule. Winners whose payment exceeds their budget are demoted
// and the auction is rerun without them until every payment fits.
AuctionOutcome RunAuction(const AuctionInstance& instance,
                          const SystemConfig& cfg);

// Income per server: the sum of the payments of the winners it serves.
std::vector<double> SellerIncome(const AuctionInstance& instance,
                                 const AuctionOutcome& outcome);

// Expected quasi-linear utility minus risk_weight times the variance of the
// Bernoulli-participation cost b_i (w1 L_offload + w2 Pay_i).
double BuyerPayoff(const AuctionInstance& instance,
                   const AuctionOutcome& outcome, std::size_t i,
                   double true_valuation, const SystemConfig& cfg);

// Expected revenue minus unit costs of sold units, minus risk_weight times
// the variance of the participation-weighted cost. Revenue is the income or
// reserve price times units, per cfg.seller_revenue.
double SellerPayoff(const AuctionInstance& instance,
                    const AuctionOutcome& outcome, std::size_t j,
                    const SystemConfig& cfg);

double SocialWelfare(std::span<const double> buyer_payoffs,
                     std::span<const double> seller_payoffs);

// Clears participation for buyers with no server meeting both the deadline
// and the budget, and for sellers with no supply or a cost above the reserve
// price. Links whose latency exceeds the buyer's deadline are cut.
void ScreenParticipants(AuctionInstance& instance);

// ue_id,es_id,demand_units,valuation,payment,payoff
void WriteOutcomeCsv(const AuctionInstance& instance,
                     const AuctionOutcome& outcome,
                     std::span<const double> buyer_payoffs, std::ostream& out);
// es_id,units_sold,income,cost,payoff
void WriteSellerCsv(const AuctionInstance& instance,
                    const AuctionOutcome& outcome,
                    std::span<const double> seller_payoffs, std::ostream& out);

}  // namespace offload

#endif  // OFFLOAD_AUCTION_H_
