#include <gtest/gtest.h>

#include <sstream>

#include "offload/auction.h"
#include "offload/harness.h"
#include "oracles.h"

namespace offload {
namespace {

BuyerBid Bid(int id, int demand, double v, double deadline = 30,
             double split = 1.0) {
  BuyerBid b;
  b.ue_id = id;
  b.demand = demand;
  b.valuation = v;
  b.deadline = deadline;
  b.budget = 1e9;
  b.split = split;
  return b;
}

SellerAsk Ask(int id, int available, double price = 0.0, double cost = 0.0) {
  SellerAsk a;
  a.es_id = id;
  a.resource = a.available = available;
  a.reserve_price = price;
  a.unit_cost = cost;
  return a;
}

// Two unit bids, valued 10 and 7, competing for one unit.
AuctionInstance SecondPrice() {
  AuctionInstance in;
  in.bids = {Bid(0, 1, 10), Bid(1, 1, 7)};
  in.asks = {Ask(0, 1)};
  return in;
}

SystemConfig Exact() {
  SystemConfig cfg;
  cfg.winner_mode = WinnerMode::kExact;
  return cfg;
}

TEST(Winners, HigherValueWins) {
  for (auto mode : {WinnerMode::kExact, WinnerMode::kGreedy}) {
    const auto a = DetermineWinners(SecondPrice(), mode);
    EXPECT_EQ(a.server, (std::vector<int>{0, kUnassigned}));
    EXPECT_EQ(a.welfare, 10.0);
  }
}

TEST(Winners, TieGoesToTighterDeadline) {
  AuctionInstance in;
  in.bids = {Bid(0, 1, 10, 75), Bid(1, 1, 10, 10)};
  in.asks = {Ask(0, 1)};
  for (auto mode : {WinnerMode::kExact, WinnerMode::kGreedy})
    EXPECT_EQ(DetermineWinners(in, mode).server,
              (std::vector<int>{kUnassigned, 0}));
  in.bids[1].deadline = 75;
  EXPECT_EQ(DetermineWinners(in, WinnerMode::kExact).server,
            (std::vector<int>{0, kUnassigned}));
}

TEST(Winners, NoFeasibleWinnerIsEmpty) {
  AuctionInstance in = SecondPrice();
  in.asks[0].available = 0;
  const auto a = DetermineWinners(in, WinnerMode::kExact);
  EXPECT_EQ(a.server, (std::vector<int>{kUnassigned, kUnassigned}));
  EXPECT_EQ(a.welfare, 0.0);
}

TEST(Winners, GreedyPicksRoomiestServer) {
  AuctionInstance in;
  in.bids = {Bid(0, 1, 10)};
  in.asks = {Ask(0, 2), Ask(1, 3), Ask(2, 3)};
  EXPECT_EQ(DetermineWinners(in, WinnerMode::kGreedy).server[0], 1);
}

TEST(Winners, ExactMatchesEnumerationAndBoundsGreedy) {
  Rng rng = MakeRng(21, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 6;
  for (int n = 0; n < 500; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    const auto values = DeclaredValues(in);
    const auto exact = DetermineWinners(in, WinnerMode::kExact);
    const auto greedy = DetermineWinners(in, WinnerMode::kGreedy);
    EXPECT_EQ(exact.welfare, oracle::BruteForce(in, values).welfare);
    EXPECT_LE(greedy.welfare, exact.welfare);
  }
}

TEST(Winners, LargerExactInstances) {
  Rng rng = MakeRng(22, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 9;
  spec.max_servers = 3;
  spec.max_capacity = 5;
  spec.max_demand = 3;
  for (int n = 0; n < 60; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    const auto values = DeclaredValues(in);
    EXPECT_EQ(DetermineWinners(in, WinnerMode::kExact).welfare,
              oracle::BruteForce(in, values).welfare);
  }
}

TEST(Values, DiscountAtZeroIsDeclared) {
  Rng rng = MakeRng(23, 0);
  const AuctionInstance in = RandomInstance(rng, {});
  EXPECT_EQ(DiscountedValues(in, 0.0), DeclaredValues(in));
}

TEST(Clarke, SecondPrice) {
  const auto in = SecondPrice();
  const auto a = DetermineWinners(in, WinnerMode::kExact);
  EXPECT_EQ(ClarkePayment(in, a, 0, WinnerMode::kExact), 7.0);
  EXPECT_THROW(ClarkePayment(in, a, 1, WinnerMode::kExact), std::domain_error);
}

TEST(Clarke, SingleBidderPaysNothing) {
  AuctionInstance in;
  in.bids = {Bid(0, 2, 50)};
  in.asks = {Ask(0, 3)};
  const auto a = DetermineWinners(in, WinnerMode::kExact);
  EXPECT_EQ(ClarkePayment(in, a, 0, WinnerMode::kExact), 0.0);
}

TEST(Clarke, DisjointServersPayNothing) {
  AuctionInstance in;
  in.bids = {Bid(0, 1, 10), Bid(1, 1, 7)};
  in.asks = {Ask(0, 1), Ask(1, 1)};
  in.link = {{1, 0}, {0, 1}};
  const auto a = DetermineWinners(in, WinnerMode::kExact);
  for (std::size_t i : {0u, 1u})
    EXPECT_EQ(ClarkePayment(in, a, i, WinnerMode::kExact), 0.0);
}

TEST(Clarke, MatchesPivotOracle) {
  Rng rng = MakeRng(24, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 6;
  for (int n = 0; n < 300; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    const auto a = DetermineWinners(in, WinnerMode::kExact);
    for (std::size_t i = 0; i < in.bids.size(); ++i) {
      if (a.server[i] == kUnassigned) continue;
      const double pay = ClarkePayment(in, a, i, WinnerMode::kExact);
      EXPECT_NEAR(pay, oracle::Pivot(in, a.server, i, 0.0), 1e-9);
      EXPECT_GE(pay, 0.0);
      EXPECT_LE(pay, in.bids[i].demand * in.bids[i].valuation);
    }
  }
}

TEST(Incentive, DiscountedSecondPrice) {
  const auto in = SecondPrice();
  const auto a = DetermineWinners(in, WinnerMode::kExact);
  EXPECT_NEAR(IncentivePayment(in, a, 0, 0.1, WinnerMode::kExact), 6.3, 1e-12);
  EXPECT_EQ(IncentivePayment(in, a, 0, 0.0, WinnerMode::kExact),
            ClarkePayment(in, a, 0, WinnerMode::kExact));
  EXPECT_THROW(IncentivePayment(in, a, 0, 1.0, WinnerMode::kExact),
               std::invalid_argument);
  EXPECT_THROW(IncentivePayment(in, a, 0, -0.1, WinnerMode::kExact),
               std::invalid_argument);
}

TEST(Incentive, MatchesPivotOracle) {
  Rng rng = MakeRng(25, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 5;
  for (int n = 0; n < 200; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    const auto a = DetermineWinners(in, WinnerMode::kExact);
    for (std::size_t i = 0; i < in.bids.size(); ++i) {
      if (a.server[i] == kUnassigned) continue;
      for (double lambda : {0.1, 0.3, 0.5}) {
        // The oracle optimizes the discounted terms without a clamp.
        const double expected = std::clamp(
            oracle::Pivot(in, a.server, i, lambda), 0.0,
            (1 - lambda * in.bids[i].split) * in.bids[i].demand *
                in.bids[i].valuation);
        EXPECT_NEAR(IncentivePayment(in, a, i, lambda, WinnerMode::kExact),
                    expected, 1e-9);
      }
    }
  }
}

TEST(Incentive, NonIncreasingUnderFullOffload) {
  Rng rng = MakeRng(26, 0);
  RandomInstanceSpec spec;
  spec.full_offload = true;
  for (int n = 0; n < 100; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    const auto a = DetermineWinners(in, WinnerMode::kExact);
    for (std::size_t i = 0; i < in.bids.size(); ++i) {
      if (a.server[i] == kUnassigned) continue;
      double prev = IncentivePayment(in, a, i, 0.0, WinnerMode::kExact);
      for (int s = 1; s <= 5; ++s) {
        const double p = IncentivePayment(in, a, i, 0.1 * s, WinnerMode::kExact);
        EXPECT_LE(p, prev + 1e-12);
        prev = p;
      }
    }
  }
}

// With mixed splits the discount can shrink the winners' terms faster than
// the alternative's, so the payment rises with the incentive factor.
TEST(Incentive, MixedSplitsCanRaiseThePayment) {
  AuctionInstance in;
  in.bids = {Bid(0, 1, 100, 30, 0.0), Bid(1, 1, 10, 30, 1.0),
             Bid(2, 2, 7.5, 30, 0.0)};
  in.asks = {Ask(0, 2)};
  const auto a = DetermineWinners(in, WinnerMode::kExact);
  ASSERT_EQ(a.server, (std::vector<int>{0, 0, kUnassigned}));
  EXPECT_DOUBLE_EQ(IncentivePayment(in, a, 0, 0.0, WinnerMode::kExact), 5.0);
  EXPECT_DOUBLE_EQ(IncentivePayment(in, a, 0, 0.5, WinnerMode::kExact), 10.0);
}

TEST(Run, BudgetViolatorIsDemoted) {
  AuctionInstance in = SecondPrice();
  in.bids[0].budget = 5;  // would pay 7
  const auto out = RunAuction(in, Exact());
  EXPECT_EQ(out.demoted, (std::vector<int>{0}));
  EXPECT_EQ(out.Winners(), (std::vector<int>{1}));
  EXPECT_EQ(out.payments[1], 0.0);
  EXPECT_EQ(out.payments[0], 0.0);
}

TEST(Run, IncomesConserveTransfers) {
  Rng rng = MakeRng(27, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 8;
  spec.max_servers = 3;
  for (int n = 0; n < 200; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    const auto out = RunAuction(in, Exact());
    const auto regrouped =
        oracle::IncomeByServer(out.allocation.server, out.payments);
    double pay = 0, income = 0;
    for (double p : out.payments) pay += p;
    for (std::size_t j = 0; j < in.asks.size(); ++j) {
      income += out.incomes[j];
      const auto it = regrouped.find(int(j));
      EXPECT_DOUBLE_EQ(out.incomes[j], it == regrouped.end() ? 0 : it->second);
    }
    EXPECT_NEAR(pay, income, 1e-9);
    EXPECT_EQ(SellerIncome(in, out), out.incomes);
  }
}

TEST(Run, NoWinnersNoIncome) {
  AuctionInstance in = SecondPrice();
  in.asks[0].participation = false;
  const auto out = RunAuction(in, Exact());
  EXPECT_TRUE(out.Winners().empty());
  EXPECT_EQ(out.incomes, (std::vector<double>{0.0}));
}

TEST(Payoff, BuyerExamples) {
  SystemConfig cfg = Exact();
  const auto in = SecondPrice();
  const auto out = RunAuction(in, cfg);
  EXPECT_DOUBLE_EQ(BuyerPayoff(in, out, 0, 10, cfg), 3.0);
  EXPECT_EQ(BuyerPayoff(in, out, 1, 7, cfg), 0.0);

  AuctionInstance risky;
  risky.bids = {Bid(0, 1, 10)};
  risky.bids[0].offload_prob = 0.5;
  risky.asks = {Ask(0, 1)};
  risky.latency = {{8.0}};
  AuctionOutcome o;
  o.allocation.server = {0};
  o.payments = {0.0};
  cfg.risk_weight = 1.0;
  cfg.latency_weight = cfg.price_weight = 0.5;  // C = 0.5 * 8 = 4
  EXPECT_DOUBLE_EQ(BuyerPayoff(risky, o, 0, 10, cfg), 1.0);
  EXPECT_DOUBLE_EQ(BuyerPayoff(risky, o, 0, 10, cfg),
                   oracle::BuyerPayoff(0.5, 10, 0, 8, 0.5, 0.5, 1.0));
}

TEST(Payoff, SellerExamples) {
  SystemConfig cfg = Exact();
  AuctionInstance in;
  in.asks = {Ask(0, 4, 1.0, 0.25)};
  AuctionOutcome o;
  o.units_sold = {4};
  o.incomes = {4.0};
  EXPECT_DOUBLE_EQ(SellerPayoff(in, o, 0, cfg), 3.0);
  cfg.seller_revenue = SellerRevenue::kReservePrice;
  EXPECT_DOUBLE_EQ(SellerPayoff(in, o, 0, cfg), 3.0);
  o.units_sold = {0};
  o.incomes = {0.0};
  EXPECT_EQ(SellerPayoff(in, o, 0, cfg), 0.0);

  in.asks[0].offload_prob = 0.5;
  o.units_sold = {4};
  o.incomes = {4.0};
  cfg.risk_weight = 2.0;
  EXPECT_DOUBLE_EQ(SellerPayoff(in, o, 0, cfg),
                   oracle::SellerPayoff(0.5, 4.0, 0.25, 4, 2.0));

  in.asks[0] = Ask(0, 4, 0.5, 0.75);  // cost above price
  ScreenParticipants(in);
  EXPECT_FALSE(in.asks[0].participation);
  EXPECT_EQ(SellerPayoff(in, o, 0, cfg), 0.0);
}

TEST(Welfare, TransfersCancel) {
  EXPECT_EQ(SocialWelfare({}, {}), 0.0);
  const std::vector<double> buyers = {10 - 7}, sellers = {7 - 2};
  EXPECT_DOUBLE_EQ(SocialWelfare(buyers, sellers), 8.0);

  SystemConfig cfg = Exact();
  Rng rng = MakeRng(28, 0);
  RandomInstanceSpec spec;
  spec.max_bids = 6;
  for (int n = 0; n < 50; ++n) {
    const AuctionInstance in = RandomInstance(rng, spec);
    AuctionOutcome out = RunAuction(in, cfg);
    auto welfare = [&] {
      std::vector<double> b, s;
      for (std::size_t i = 0; i < in.bids.size(); ++i)
        b.push_back(BuyerPayoff(in, out, i, in.bids[i].valuation, cfg));
      for (std::size_t j = 0; j < in.asks.size(); ++j)
        s.push_back(SellerPayoff(in, out, j, cfg));
      return SocialWelfare(b, s);
    };
    const double before = welfare();
    for (std::size_t i = 0; i < in.bids.size(); ++i)
      if (out.IsWinner(i)) {
        out.payments[i] += 1.5;
        out.incomes[out.allocation.server[i]] += 1.5;
      }
    EXPECT_NEAR(welfare(), before, 1e-9);
  }
}

TEST(Screening, Examples) {
  AuctionInstance in;
  in.bids = {Bid(0, 1, 10, 3), Bid(1, 1, 10, 30)};
  in.asks = {Ask(0, 2, 0.5, 0.1), Ask(1, 0, 0.5, 0.1)};
  in.latency = {{5, 5}, {5, 5}};
  ScreenParticipants(in);
  EXPECT_FALSE(in.bids[0].participation);  // offload latency 5 > deadline 3
  EXPECT_TRUE(in.bids[1].participation);
  EXPECT_TRUE(in.asks[0].participation);
  EXPECT_FALSE(in.asks[1].participation);  // no supply

  AuctionInstance ok;
  ok.bids = {Bid(0, 1, 10), Bid(1, 2, 10)};
  ok.asks = {Ask(0, 3, 0.5, 0.2)};
  ScreenParticipants(ok);
  for (const auto& b : ok.bids) EXPECT_TRUE(b.participation);
  EXPECT_TRUE(ok.asks[0].participation);

  ok.bids[0].budget = 0.1;  // cannot afford the reserve price
  ScreenParticipants(ok);
  EXPECT_FALSE(ok.bids[0].participation);
}

TEST(Export, OutcomeCsv) {
  SystemConfig cfg = Exact();
  const auto in = SecondPrice();
  const auto out = RunAuction(in, cfg);
  const std::vector<double> payoffs = {3, 0};
  std::ostringstream o, s;
  WriteOutcomeCsv(in, out, payoffs, o);
  EXPECT_EQ(o.str().substr(0, o.str().find('\n')),
            "ue_id,es_id,demand_units,valuation,payment,payoff");
  const std::vector<double> seller = {7};
  WriteSellerCsv(in, out, seller, s);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')),
            "es_id,units_sold,income,cost,payoff");
}

}  // namespace
}  // namespace offload
