#include "offload/game.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <stdexcept>

namespace offload {

void BestResponseGrid::Validate() const {
  for (const auto* list : {&valuations, &prices}) {
    if (list->empty()) throw std::invalid_argument("empty strategy grid");
    for (std::size_t k = 1; k < list->size(); ++k)
      if (!((*list)[k] > (*list)[k - 1]))
        throw std::invalid_argument("strategy grid not strictly increasing");
  }
}

std::vector<double> LinearGrid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw std::invalid_argument("bad grid range");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double v = lo + k * step;
    if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
    grid.push_back(v);
  }
  return grid;
}

std::vector<double> EvenGrid(double lo, double hi, int points) {
  if (points < 1 || hi < lo) throw std::invalid_argument("bad grid range");
  if (points == 1 || hi == lo) return {lo};
  std::vector<double> grid(points);
  for (int k = 0; k < points; ++k)
    grid[k] = lo + (hi - lo) * k / (points - 1);
  return grid;
}

BestResponseGrid MakeGrid(const SystemConfig& cfg) {
  BestResponseGrid g;
  g.valuations =
      LinearGrid(cfg.valuation_min, cfg.valuation_max, cfg.valuation_grid_step);
  g.prices = EvenGrid(cfg.reserve_price_min, cfg.reserve_price_max,
                      cfg.price_grid_points);
  return g;
}

bool OffloadDecision(std::span<const double> valuations,
                     std::span<const double> prices) {
  double v = 0.0, p = 0.0;
  for (double x : valuations) v += x;
  for (double x : prices) p += x;
  return v >= p;
}

namespace {

struct EvalResult {
  bool won = false;
  double payoff = 0.0;
};

AuctionInstance WithSellerScreening(const AuctionInstance& in) {
  AuctionInstance out = in;
  for (auto& a : out.asks)
    if (a.available <= 0 || a.unit_cost > a.reserve_price)
      a.participation = false;
  return out;
}

std::vector<double> TermValues(const AuctionInstance& in,
                               const SystemConfig& cfg) {
  return cfg.payment_rule == PaymentRule::kIncentive
             ? DiscountedValues(in, cfg.incentive_factor)
             : DeclaredValues(in);
}

bool HasEligibleServer(const AuctionInstance& in, std::size_t i) {
  for (std::size_t j = 0; j < in.asks.size(); ++j)
    if (in.Eligible(i, j)) return true;
  return false;
}

// Evaluates bidder i's payoff across declarations. The welfare of the others
// without i does not depend on i's declaration and is computed once.
class BuyerEvaluator {
 public:
  BuyerEvaluator(const AuctionInstance& instance, std::size_t i,
                 const SystemConfig& cfg)
      : work_(WithSellerScreening(instance)), i_(i), cfg_(cfg) {
    values_ = TermValues(work_, cfg);
    without_ = SolveAllocation(work_, values_, cfg.winner_mode,
                               static_cast<int>(i))
                   .welfare;
  }

  double Payoff(double bid, double true_value) {
    return Evaluate(bid, true_value).payoff;
  }

  EvalResult Evaluate(double bid, double true_value) {
    BuyerBid& b = work_.bids[i_];
    b.valuation = bid;
    values_[i_] = cfg_.payment_rule == PaymentRule::kIncentive
                      ? (1.0 - cfg_.incentive_factor * b.split) *
                            (b.demand * b.valuation)
                      : b.demand * b.valuation;
    AuctionOutcome out;
    out.allocation = SolveAllocation(work_, values_, cfg_.winner_mode);
    for (std::size_t k = 0; k < work_.bids.size(); ++k) {
      const BuyerBid& bk = work_.bids[k];
      // A payment never exceeds the declared value, so this budget cannot
      // bind; otherwise fall back to the full mechanism.
      if (out.IsWinner(k) && bk.demand * bk.valuation > bk.budget) {
        const AuctionOutcome full = RunAuction(work_, cfg_);
        return {full.IsWinner(i_),
                BuyerPayoff(work_, full, i_, true_value, cfg_)};
      }
    }
    if (!out.IsWinner(i_)) return {};
    double others = 0.0;
    for (std::size_t k = 0; k < work_.bids.size(); ++k)
      if (k != i_ && out.IsWinner(k)) others += values_[k];
    out.payments.assign(work_.bids.size(), 0.0);
    out.payments[i_] =
        std::clamp(without_ - others, 0.0, std::max(0.0, values_[i_]));
    return {true, BuyerPayoff(work_, out, i_, true_value, cfg_)};
  }

  const AuctionInstance& instance() const { return work_; }

 private:
  AuctionInstance work_;
  std::size_t i_;
  const SystemConfig& cfg_;
  std::vector<double> values_;
  double without_ = 0.0;
};

}  // namespace

RoundResult RunAuctionRound(const EquilibriumState& state,
                            const SystemConfig& cfg) {
  const AuctionInstance in = WithSellerScreening(state.instance);
  RoundResult r;
  r.outcome = RunAuction(in, cfg);
  r.buyer_payoffs.resize(in.bids.size());
  for (std::size_t i = 0; i < in.bids.size(); ++i) {
    r.buyer_payoffs[i] =
        BuyerPayoff(in, r.outcome, i, state.true_values[i], cfg);
    if (r.outcome.IsWinner(i))
      r.total_cost +=
          cfg.latency_weight * in.Latency(i, r.outcome.allocation.server[i]) +
          cfg.price_weight * r.outcome.payments[i];
  }
  r.seller_payoffs.resize(in.asks.size());
  for (std::size_t j = 0; j < in.asks.size(); ++j)
    r.seller_payoffs[j] = SellerPayoff(in, r.outcome, j, cfg);
  r.welfare = SocialWelfare(r.buyer_payoffs, r.seller_payoffs);
  return r;
}

double EvaluateBuyerBid(const AuctionInstance& instance, std::size_t i,
                        double bid, double true_value,
                        const SystemConfig& cfg) {
  return BuyerEvaluator(instance, i, cfg).Payoff(bid, true_value);
}

Response BestResponseBuyer(const EquilibriumState& state, std::size_t i,
                           const SystemConfig& cfg, GridSearch search) {
  const auto& grid = state.grid.valuations;
  if (grid.empty()) throw std::invalid_argument("empty valuation grid");
  BuyerEvaluator eval(state.instance, i, cfg);
  const double truth = state.true_values[i];
  Response r;
  r.current_payoff = eval.Payoff(state.instance.bids[i].valuation, truth);

  bool slack = search == GridSearch::kAuto &&
               cfg.winner_mode == WinnerMode::kExact;
  const auto& bids = state.instance.bids;
  for (std::size_t k = 0; k < bids.size() && slack; ++k) {
    const double v = k == i ? grid.back() : bids[k].valuation;
    slack = bids[k].demand * v <= bids[k].budget;
  }
  if (slack) {
    // With exact allocation and no binding budget, winning is monotone in
    // the declaration and every winning declaration pays the same pivot, so
    // the best grid point is the lowest winning one when winning pays,
    // else the lowest grid point.
    std::size_t lo = 0, hi = grid.size();
    EvalResult at_hi;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const auto res = eval.Evaluate(grid[mid], truth);
      if (res.won) {
        hi = mid;
        at_hi = {true, res.payoff};
      } else {
        lo = mid + 1;
      }
    }
    r.choice = grid.front();
    r.best_payoff = lo == 0 && at_hi.won ? at_hi.payoff : 0.0;
    if (lo < grid.size() && at_hi.won && at_hi.payoff > r.best_payoff) {
      r.choice = grid[lo];
      r.best_payoff = at_hi.payoff;
    }
    return r;
  }

  r.choice = grid.front();
  r.best_payoff = eval.Payoff(grid.front(), truth);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double p = eval.Payoff(grid[k], truth);
    if (p > r.best_payoff) {
      r.best_payoff = p;
      r.choice = grid[k];
    }
  }
  return r;
}

Response BestResponseSeller(const EquilibriumState& state, std::size_t j,
                            const SystemConfig& cfg) {
  const auto& grid = state.grid.prices;
  if (grid.empty()) throw std::invalid_argument("empty price grid");
  EquilibriumState trial = state;
  AuctionInstance& in = trial.instance;
  // A price only matters to the auction through which bids can afford the
  // server and whether the seller stays in; outcomes are shared between
  // prices with the same pattern.
  std::map<std::vector<bool>, AuctionOutcome> outcomes;
  auto payoff_at = [&](double price) {
    in.asks[j].reserve_price = price;
    const SellerAsk& a = in.asks[j];
    if (!a.participation || a.available <= 0 || a.unit_cost > price)
      return 0.0;
    std::vector<bool> pattern;
    for (const auto& b : in.bids) pattern.push_back(b.demand * price <= b.budget);
    auto it = outcomes.find(pattern);
    if (it == outcomes.end())
      it = outcomes
               .emplace(pattern, RunAuction(WithSellerScreening(in), cfg))
               .first;
    return SellerPayoff(in, it->second, j, cfg);
  };
  Response r;
  r.current_payoff = payoff_at(state.instance.asks[j].reserve_price);
  r.choice = grid.front();
  r.best_payoff = payoff_at(grid.front());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double p = payoff_at(grid[k]);
    if (p > r.best_payoff) {
      r.best_payoff = p;
      r.choice = grid[k];
    }
  }
  return r;
}

Fulfillment CheckFulfillment(const EquilibriumState& state,
                             const RoundResult& round) {
  const AuctionInstance in = WithSellerScreening(state.instance);
  Fulfillment f;
  f.user_fulfilled = true;
  for (std::size_t i = 0; i < in.bids.size(); ++i) {
    if (!in.bids[i].participation) continue;
    std::vector<double> values, prices;
    for (std::size_t j = 0; j < in.asks.size(); ++j) {
      if (!in.asks[j].participation) continue;
      if (!in.link.empty() && !in.link[i][j]) continue;
      values.push_back(state.true_values[i]);
      prices.push_back(in.asks[j].reserve_price);
    }
    if (!values.empty() && OffloadDecision(values, prices) &&
        !round.outcome.IsWinner(i))
      f.user_fulfilled = false;
  }
  int supply = 0, sold = 0;
  for (std::size_t j = 0; j < in.asks.size(); ++j) {
    if (in.asks[j].participation) supply += in.asks[j].available;
    sold += round.outcome.units_sold[j];
  }
  f.server_fulfilled = sold == supply;
  return f;
}

EquilibriumReport RunToEquilibrium(EquilibriumState& state,
                                   const SystemConfig& cfg, double epsilon,
                                   int max_iter, int stable_sweeps) {
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (stable_sweeps < 1)
    throw std::invalid_argument("stable_sweeps must be >= 1");
  state.grid.Validate();

  EquilibriumReport rep;
  rep.epsilon = epsilon;
  RoundResult round = RunAuctionRound(state, cfg);
  rep.initial_cost = round.total_cost;
  double previous_cost = round.total_cost;
  int stable = 0;

  auto record = [&](double max_gain) {
    ++rep.iterations;
    std::vector<double> bids, prices;
    for (const auto& b : state.instance.bids) bids.push_back(b.valuation);
    for (const auto& a : state.instance.asks) prices.push_back(a.reserve_price);
    rep.bid_trace.push_back(std::move(bids));
    rep.price_trace.push_back(std::move(prices));
    rep.cost_trace.push_back(round.total_cost);
    rep.welfare_trace.push_back(round.welfare);
    rep.max_gain_trace.push_back(max_gain);
  };

  while (rep.iterations < max_iter) {
    int moved = 0;
    double max_gain = 0.0;
    const AuctionInstance screened = WithSellerScreening(state.instance);
    for (std::size_t i = 0; i < state.instance.bids.size(); ++i) {
      // A bidder no server can take earns nothing under any declaration.
      if (!HasEligibleServer(screened, i)) continue;
      const Response r = BestResponseBuyer(state, i, cfg);
      const double gain = r.best_payoff - r.current_payoff;
      max_gain = std::max(max_gain, gain);
      if (gain > epsilon) {
        state.instance.bids[i].valuation = r.choice;
        ++moved;
      }
    }
    for (std::size_t j = 0; j < state.instance.asks.size(); ++j) {
      const Response r = BestResponseSeller(state, j, cfg);
      const double gain = r.best_payoff - r.current_payoff;
      max_gain = std::max(max_gain, gain);
      if (gain > epsilon) {
        state.instance.asks[j].reserve_price = r.choice;
        ++moved;
      }
    }
    round = RunAuctionRound(state, cfg);
    record(max_gain);
    stable = std::abs(round.total_cost - previous_cost) < epsilon ? stable + 1
                                                                  : 0;
    previous_cost = round.total_cost;
    if (moved == 0) {
      // Best responses are deterministic in the state, so every later sweep
      // repeats this one.
      while (stable < stable_sweeps && rep.iterations < max_iter) {
        record(max_gain);
        ++stable;
      }
      rep.converged = stable >= stable_sweeps;
      break;
    }
  }
  rep.final_round = round;
  rep.fulfillment = CheckFulfillment(state, round);
  return rep;
}

void WriteEquilibriumCsv(const EquilibriumReport& report, std::ostream& out) {
  out << "iteration,total_cost,welfare,max_deviation_gain\n"
      << std::setprecision(10);
  for (std::size_t k = 0; k < report.cost_trace.size(); ++k)
    out << k + 1 << ',' << report.cost_trace[k] << ','
        << report.welfare_trace[k] << ',' << report.max_gain_trace[k] << '\n';
}

}  // namespace offload
