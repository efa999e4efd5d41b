#include "offload/auction.h"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <numeric>
#include <stdexcept>

namespace offload {

bool AuctionInstance::Eligible(std::size_t i, std::size_t j) const {
  const BuyerBid& b = bids[i];
  const SellerAsk& a = asks[j];
  if (!b.participation || !a.participation) return false;
  if (!link.empty() && !link[i][j]) return false;
  if (b.demand <= 0 || b.demand > a.available) return false;
  return b.demand * a.reserve_price <= b.budget;
}

double AuctionInstance::Latency(std::size_t i, std::size_t j) const {
  return latency.empty() ? 0.0 : latency[i][j];
}

std::vector<double> DeclaredValues(const AuctionInstance& instance) {
  std::vector<double> v(instance.bids.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = instance.bids[i].demand * instance.bids[i].valuation;
  return v;
}

std::vector<double> DiscountedValues(const AuctionInstance& instance,
                                     double lambda) {
  std::vector<double> v(instance.bids.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const BuyerBid& b = instance.bids[i];
    v[i] = (1.0 - lambda * b.split) * (b.demand * b.valuation);
  }
  return v;
}

std::vector<std::size_t> PriorityOrder(const AuctionInstance& instance,
                                       std::span<const double> values) {
  std::vector<std::size_t> order(instance.bids.size());
  std::iota(order.begin(), order.end(), 0);
  auto per_unit = [&](std::size_t i) {
    const int d = instance.bids[i].demand;
    return d > 0 ? values[i] / d : 0.0;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const double ua = per_unit(a), ub = per_unit(b);
                     if (ua != ub) return ua > ub;
                     const auto& ba = instance.bids[a];
                     const auto& bb = instance.bids[b];
                     if (ba.deadline != bb.deadline)
                       return ba.deadline < bb.deadline;
                     return ba.ue_id < bb.ue_id;
                   });
  return order;
}

namespace {

double CanonicalWelfare(const std::vector<int>& server,
                        std::span<const double> values) {
  double w = 0.0;
  for (std::size_t i = 0; i < server.size(); ++i)
    if (server[i] != kUnassigned) w += values[i];
  return w;
}

// Branch and bound over bids in priority order: each bid is placed on one
// of its eligible servers or left out. The bound is the fractional
// relaxation in which a bid may spread over its eligible servers; filling it
// greedily by per-unit value is exact because the feasible fractional loads
// form a polymatroid (cut condition over server subsets). Bids with equal
// demand and eligibility are interchangeable, so once one is left out every
// later (no more valuable) bid of its class is left out too.
class ExactSolver {
 public:
  ExactSolver(const AuctionInstance& in, std::span<const double> values,
              int exclude)
      : in_(in), values_(values) {
    const std::size_t m = in.asks.size();
    use_subsets_ = m <= kMaxSubsetServers;
    std::vector<std::pair<std::vector<std::uint8_t>, int>> class_keys;
    for (std::size_t i : PriorityOrder(in, values)) {
      if (static_cast<int>(i) == exclude || !(values[i] > 0)) continue;
      std::vector<std::uint8_t> row(m);
      bool any = false;
      for (std::size_t j = 0; j < m; ++j) {
        row[j] = in.Eligible(i, j);
        any = any || row[j];
      }
      if (!any) continue;
      std::uint32_t mask = 0;
      if (use_subsets_)
        for (std::size_t j = 0; j < m; ++j)
          if (row[j]) mask |= 1u << j;
      const std::pair<std::vector<std::uint8_t>, int> key{row,
                                                          in.bids[i].demand};
      auto it = std::find(class_keys.begin(), class_keys.end(), key);
      item_class_.push_back(static_cast<int>(it - class_keys.begin()));
      if (it == class_keys.end()) class_keys.push_back(key);
      items_.push_back(i);
      eligible_.push_back(std::move(row));
      mask_.push_back(mask);
    }
    class_blocked_.assign(class_keys.size(), 0);
    residual_.resize(m);
    for (std::size_t j = 0; j < m; ++j)
      residual_[j] = in.asks[j].participation ? in.asks[j].available : 0;
    // Servers with identical eligibility columns are interchangeable.
    server_class_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      server_class_[j] = static_cast<int>(j);
      for (std::size_t k = 0; k < j; ++k) {
        bool same = true;
        for (const auto& row : eligible_)
          if (row[j] != row[k]) {
            same = false;
            break;
          }
        if (same) {
          server_class_[j] = server_class_[k];
          break;
        }
      }
    }
    if (use_subsets_) slack_.resize(std::size_t{1} << m);
    assign_.assign(items_.size(), kUnassigned);
  }

  std::vector<int> Solve(const std::vector<int>& incumbent) {
    best_value_ = 0.0;
    for (std::size_t p = 0; p < items_.size(); ++p)
      if (incumbent[items_[p]] != kUnassigned) best_value_ += Value(p);
    best_assign_.assign(items_.size(), kUnassigned);
    for (std::size_t p = 0; p < items_.size(); ++p)
      best_assign_[p] = incumbent[items_[p]];
    total_residual_ = std::accumulate(residual_.begin(), residual_.end(), 0);
    Search(0, 0.0);

    std::vector<int> server(in_.bids.size(), kUnassigned);
    for (std::size_t p = 0; p < items_.size(); ++p)
      server[items_[p]] = best_assign_[p];
    return server;
  }

 private:
  static constexpr std::size_t kMaxSubsetServers = 12;

  double Value(std::size_t p) const { return values_[items_[p]]; }
  int Demand(std::size_t p) const { return in_.bids[items_[p]].demand; }

  double PooledBound(std::size_t p) const {
    double bound = 0.0;
    int room = total_residual_;
    for (; p < items_.size() && room > 0; ++p) {
      if (class_blocked_[item_class_[p]]) continue;
      const int d = Demand(p);
      if (d <= room) {
        bound += Value(p);
        room -= d;
      } else {
        bound += Value(p) * room / d;
        room = 0;
      }
    }
    return bound;
  }

  double Bound(std::size_t p) {
    if (!use_subsets_) return PooledBound(p);
    const std::size_t full = slack_.size() - 1;
    slack_[0] = 0;
    for (std::size_t t = 1; t <= full; ++t) {
      const int low = std::countr_zero(t);
      slack_[t] = slack_[t & (t - 1)] + residual_[low];
    }
    double bound = 0.0;
    for (; p < items_.size() && slack_[full] > 0; ++p) {
      if (class_blocked_[item_class_[p]]) continue;
      const std::uint32_t e = mask_[p];
      int x = Demand(p);
      for (std::size_t t = e; t <= full; t = (t + 1) | e)
        x = std::min(x, slack_[t]);
      if (x <= 0) continue;
      bound += Value(p) * x / Demand(p);
      for (std::size_t t = e; t <= full; t = (t + 1) | e) slack_[t] -= x;
    }
    return bound;
  }

  void Search(std::size_t p, double value) {
    while (p < items_.size() && class_blocked_[item_class_[p]]) ++p;
    if (value + Bound(p) <= best_value_) return;
    if (p == items_.size()) {
      best_value_ = value;
      best_assign_ = assign_;
      return;
    }
    const int d = Demand(p);
    for (std::size_t j = 0; j < residual_.size(); ++j) {
      if (!eligible_[p][j] || residual_[j] < d) continue;
      bool duplicate = false;
      for (std::size_t k = 0; k < j; ++k) {
        if (server_class_[k] == server_class_[j] &&
            residual_[k] == residual_[j]) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) continue;
      residual_[j] -= d;
      total_residual_ -= d;
      assign_[p] = static_cast<int>(j);
      Search(p + 1, value + Value(p));
      assign_[p] = kUnassigned;
      residual_[j] += d;
      total_residual_ += d;
    }
    ++class_blocked_[item_class_[p]];
    Search(p + 1, value);
    --class_blocked_[item_class_[p]];
  }

  const AuctionInstance& in_;
  std::span<const double> values_;
  bool use_subsets_ = false;
  std::vector<std::size_t> items_;
  std::vector<std::vector<std::uint8_t>> eligible_;
  std::vector<std::uint32_t> mask_;
  std::vector<int> item_class_;
  std::vector<int> class_blocked_;
  std::vector<int> residual_;
  std::vector<int> slack_;
  std::vector<int> server_class_;
  std::vector<int> assign_;
  std::vector<int> best_assign_;
  double best_value_ = 0.0;
  int total_residual_ = 0;
};

// Bids in priority order, each onto the eligible server with the most
// residual capacity (lowest index on ties).
std::vector<int> SolveGreedy(const AuctionInstance& in,
                             std::span<const double> values, int exclude) {
  std::vector<int> residual(in.asks.size());
  for (std::size_t j = 0; j < in.asks.size(); ++j)
    residual[j] = in.asks[j].participation ? in.asks[j].available : 0;
  std::vector<int> server(in.bids.size(), kUnassigned);
  for (std::size_t i : PriorityOrder(in, values)) {
    if (static_cast<int>(i) == exclude || !(values[i] > 0)) continue;
    const int d = in.bids[i].demand;
    int pick = kUnassigned;
    for (std::size_t j = 0; j < in.asks.size(); ++j) {
      if (!in.Eligible(i, j) || residual[j] < d) continue;
      if (pick == kUnassigned || residual[j] > residual[pick])
        pick = static_cast<int>(j);
    }
    if (pick != kUnassigned) {
      server[i] = pick;
      residual[pick] -= d;
    }
  }
  return server;
}

double PaymentFor(const AuctionInstance& instance, const Allocation& allocation,
                  std::size_t i, const SystemConfig& cfg) {
  if (cfg.payment_rule == PaymentRule::kIncentive)
    return IncentivePayment(instance, allocation, i, cfg.incentive_factor,
                            cfg.winner_mode);
  return ClarkePayment(instance, allocation, i, cfg.winner_mode);
}

}  // namespace

Allocation SolveAllocation(const AuctionInstance& instance,
                           std::span<const double> values, WinnerMode mode,
                           int exclude) {
  Allocation a;
  a.server = SolveGreedy(instance, values, exclude);
  if (mode == WinnerMode::kExact)
    a.server = ExactSolver(instance, values, exclude).Solve(a.server);
  a.welfare = CanonicalWelfare(a.server, values);
  return a;
}

Allocation DetermineWinners(const AuctionInstance& instance, WinnerMode mode) {
  const auto values = DeclaredValues(instance);
  return SolveAllocation(instance, values, mode);
}

std::vector<int> AuctionOutcome::Winners() const {
  std::vector<int> w;
  for (std::size_t i = 0; i < allocation.server.size(); ++i)
    if (allocation.server[i] != kUnassigned) w.push_back(static_cast<int>(i));
  return w;
}

double PivotPayment(const AuctionInstance& instance,
                    const Allocation& allocation, std::size_t i,
                    std::span<const double> values, WinnerMode mode) {
  if (i >= allocation.server.size() || allocation.server[i] == kUnassigned)
    throw std::domain_error("payment requested for a bid that did not win");
  const Allocation without =
      SolveAllocation(instance, values, mode, static_cast<int>(i));
  double others_with = 0.0;
  for (std::size_t k = 0; k < allocation.server.size(); ++k)
    if (k != i && allocation.server[k] != kUnassigned) others_with += values[k];
  // Exact search makes this non-negative and at most values[i] up to
  // rounding; the greedy pivot carries no such guarantee.
  return std::clamp(without.welfare - others_with, 0.0,
                    std::max(0.0, values[i]));
}

double ClarkePayment(const AuctionInstance& instance,
                     const Allocation& allocation, std::size_t i,
                     WinnerMode mode) {
  const auto values = DeclaredValues(instance);
  return PivotPayment(instance, allocation, i, values, mode);
}

double IncentivePayment(const AuctionInstance& instance,
                        const Allocation& allocation, std::size_t i,
                        double lambda, WinnerMode mode) {
  if (!(lambda >= 0 && lambda < 1))
    throw std::invalid_argument("incentive factor must lie in [0, 1)");
  const auto values = DiscountedValues(instance, lambda);
  return PivotPayment(instance, allocation, i, values, mode);
}

AuctionOutcome RunAuction(const AuctionInstance& instance,
                          const SystemConfig& cfg) {
  AuctionInstance work = instance;
  AuctionOutcome out;
  for (;;) {
    out.allocation = DetermineWinners(work, cfg.winner_mode);
    out.payments.assign(work.bids.size(), 0.0);
    std::vector<int> over_budget;
    for (std::size_t i = 0; i < work.bids.size(); ++i) {
      if (!out.IsWinner(i)) continue;
      out.payments[i] = PaymentFor(work, out.allocation, i, cfg);
      if (out.payments[i] > work.bids[i].budget)
        over_budget.push_back(static_cast<int>(i));
    }
    if (over_budget.empty()) break;
    for (int i : over_budget) {
      work.bids[i].participation = false;
      out.demoted.push_back(i);
    }
  }
  out.declared_welfare = out.allocation.welfare;
  out.units_sold.assign(work.asks.size(), 0);
  for (std::size_t i = 0; i < work.bids.size(); ++i)
    if (out.IsWinner(i))
      out.units_sold[out.allocation.server[i]] += work.bids[i].demand;
  out.incomes = SellerIncome(work, out);
  return out;
}

std::vector<double> SellerIncome(const AuctionInstance& instance,
                                 const AuctionOutcome& outcome) {
  std::vector<double> income(instance.asks.size(), 0.0);
  for (std::size_t i = 0; i < outcome.allocation.server.size(); ++i)
    if (outcome.IsWinner(i))
      income[outcome.allocation.server[i]] += outcome.payments[i];
  return income;
}

double BuyerPayoff(const AuctionInstance& instance,
                   const AuctionOutcome& outcome, std::size_t i,
                   double true_valuation, const SystemConfig& cfg) {
  if (!outcome.IsWinner(i)) return 0.0;
  const BuyerBid& b = instance.bids[i];
  const double q = b.offload_prob;
  const double pay = outcome.payments[i];
  const double value = b.demand * true_valuation;
  const double cost =
      cfg.latency_weight * instance.Latency(i, outcome.allocation.server[i]) +
      cfg.price_weight * pay;
  const double variance = q * (1.0 - q) * cost * cost;
  return q * (value - pay) - cfg.risk_weight * variance;
}

double SellerPayoff(const AuctionInstance& instance,
                    const AuctionOutcome& outcome, std::size_t j,
                    const SystemConfig& cfg) {
  const SellerAsk& a = instance.asks[j];
  if (!a.participation) return 0.0;
  const int units = outcome.units_sold[j];
  const double revenue = cfg.seller_revenue == SellerRevenue::kIncome
                             ? outcome.incomes[j]
                             : a.reserve_price * units;
  const double cost = a.unit_cost * units;
  const double q = a.offload_prob;
  const double variance = q * (1.0 - q) * cost * cost;
  return q * (revenue - cost) - cfg.risk_weight * variance;
}

double SocialWelfare(std::span<const double> buyer_payoffs,
                     std::span<const double> seller_payoffs) {
  return std::accumulate(buyer_payoffs.begin(), buyer_payoffs.end(), 0.0) +
         std::accumulate(seller_payoffs.begin(), seller_payoffs.end(), 0.0);
}

void ScreenParticipants(AuctionInstance& instance) {
  const std::size_t n = instance.bids.size();
  const std::size_t m = instance.asks.size();
  for (auto& a : instance.asks)
    if (a.available <= 0 || a.unit_cost > a.reserve_price)
      a.participation = false;
  if (instance.link.empty())
    instance.link.assign(n, std::vector<std::uint8_t>(m, 1));
  for (std::size_t i = 0; i < n; ++i) {
    BuyerBid& b = instance.bids[i];
    bool any = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (instance.Latency(i, j) > b.deadline) instance.link[i][j] = 0;
      const bool affordable =
          b.demand * instance.asks[j].reserve_price <= b.budget;
      any = any || (instance.link[i][j] && affordable &&
                    instance.asks[j].participation);
    }
    if (!any) b.participation = false;
  }
}

void WriteOutcomeCsv(const AuctionInstance& instance,
                     const AuctionOutcome& outcome,
                     std::span<const double> buyer_payoffs, std::ostream& out) {
  out << "ue_id,es_id,demand_units,valuation,payment,payoff\n"
      << std::setprecision(10);
  for (std::size_t i = 0; i < instance.bids.size(); ++i) {
    const BuyerBid& b = instance.bids[i];
    const int s = outcome.allocation.server[i];
    out << b.ue_id << ',' << (s == kUnassigned ? -1 : instance.asks[s].es_id)
        << ',' << (s == kUnassigned ? 0 : b.demand) << ',' << b.valuation << ','
        << outcome.payments[i] << ',' << buyer_payoffs[i] << '\n';
  }
}

void WriteSellerCsv(const AuctionInstance& instance,
                    const AuctionOutcome& outcome,
                    std::span<const double> seller_payoffs, std::ostream& out) {
  out << "es_id,units_sold,income,cost,payoff\n" << std::setprecision(10);
  for (std::size_t j = 0; j < instance.asks.size(); ++j) {
    const SellerAsk& a = instance.asks[j];
    out << a.es_id << ',' << outcome.units_sold[j] << ',' << outcome.incomes[j]
        << ',' << a.unit_cost * outcome.units_sold[j] << ','
        << seller_payoffs[j] << '\n';
  }
}

}  // namespace offload
