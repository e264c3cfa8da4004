#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "defisem/analysis.hpp"

using namespace defisem;

namespace {

Token t0 = Token::free("tau0");
Token t1 = Token::free("tau1");
Token t2 = Token::free("tau2");
Token m1 = Token::lp_claim("tau1");
Token m2 = Token::lp_claim("tau2");

}  // namespace

TEST_CASE("net worth sums wallet, claim, and loan positions at prices") {
  Config cfg;
  cfg.wallets["A"][t0] = 100;
  cfg.wallets["A"][t1] = 300;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  CHECK(*net_worth(cfg, "A") == Rat(400));

  cfg.prices["tau1"] = 2;
  CHECK(*net_worth(cfg, "A") == Rat(700));

  cfg.wallets["V"][t0] = 16;
  cfg.wallets["V"][m1] = 10;
  cfg.wallets["V"][m2] = 10;
  cfg.pool.minted["tau1"] = 10;
  cfg.pool.funds["tau1"] = 12;
  cfg.pool.minted["tau2"] = 10;
  cfg.pool.funds["tau2"] = Rat(105, 10);
  cfg.pool.loans["V"]["tau0"] = 16;
  cfg.prices["tau1"] = 1;
  cfg.prices["tau2"] = 1;
  CHECK(exchange_rate(cfg, "tau1") == Rat(12, 10));
  CHECK(exchange_rate(cfg, "tau2") == Rat(105, 100));
  CHECK(*net_worth(cfg, "V") == Rat(225, 10));
}

TEST_CASE("amm shares are outside the net worth measure") {
  Config cfg;
  cfg.wallets["A"][t0] = 10;
  cfg.wallets["A"][Token::amm_share("tau0", "tau1")] = 50;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  CHECK(*net_worth(cfg, "A") == Rat(10));
}

TEST_CASE("non-recoverable loan value") {
  Config cfg;
  LpParams p;
  p.r_liq = Rat(11, 10);
  cfg.wallets["V"][m1] = 55;
  cfg.pool.minted["tau1"] = 55;
  cfg.pool.funds["tau1"] = 55;
  cfg.pool.loans["V"]["tau0"] = 100;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  CHECK(*nr_loan_value(cfg, p, "V") == Rat(50));
  cfg.pool.loans["V"]["tau0"] = 40;
  CHECK(*nr_loan_value(cfg, p, "V") == Rat(0));
}

TEST_CASE("safety report ratios") {
  Config cfg;
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(11, 10);
  cfg.wallets["V1"][m1] = 100;
  cfg.wallets["V2"][m1] = 200;
  cfg.pool.minted["tau1"] = 300;
  cfg.pool.funds["tau1"] = 300;
  cfg.pool.loans["V1"]["tau0"] = 100;
  cfg.pool.loans["V2"]["tau0"] = 100;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  auto rep = safety_report(cfg, p);
  REQUIRE(rep);
  CHECK(rep->per_user.at("V1").coll == ExtRat::of(Rat(1)));
  CHECK(rep->per_user.at("V2").coll == ExtRat::of(Rat(2)));
  CHECK(rep->epsilon_ratio == Rat(1, 2));
  CHECK(rep->per_user.at("V1").nr_loan_val == Rat(100) - Rat(100) / Rat(11, 10));
  CHECK(rep->strong_epsilon_ratio ==
        (Rat(100) - Rat(100) / Rat(11, 10)) / Rat(200));
  CHECK(rep->strong_epsilon_ratio <= rep->epsilon_ratio);
}

namespace {

// One liquidatable victim with a single collateral: every cap is explicit.
Config one_victim() {
  Config cfg;
  cfg.wallets["V"][m1] = 100;
  cfg.pool.minted["tau1"] = 100;
  cfg.pool.funds["tau1"] = 84;
  cfg.pool.loans["X"]["tau1"] = 18;
  cfg.wallets["X"][m1] = 0;
  cfg.pool.loans["V"]["tau0"] = 80;
  cfg.pool.funds["tau0"] = 100;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  return cfg;
}

}  // namespace

TEST_CASE("single-victim optimum is the tightest cap") {
  Config cfg = one_victim();
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  REQUIRE(exchange_rate(cfg, "tau1") == Rat(102, 100));
  auto heur = optimal_liquidation(cfg, p, Rat(1));
  REQUIRE(heur);
  auto oracle = optimal_liquidation_oracle(cfg, p, Rat(1));
  REQUIRE(oracle);
  REQUIRE(heur->seized.size() == 1);
  SeizeKey key{"V", "tau0", "tau1"};
  CHECK(heur->seized.at(key) == Rat(82));
  CHECK(heur->objective == Rat(82) * (Rat(102, 100) - Rat(4, 5)));
  CHECK(oracle->objective == heur->objective);
  CHECK(plan_feasible(cfg, p, *heur));
  CHECK(plan_feasible(cfg, p, *oracle));
}

TEST_CASE("granularity floors the allocation") {
  Config cfg = one_victim();
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  auto fine = optimal_liquidation(cfg, p, Rat(1, 100));
  REQUIRE(fine);
  SeizeKey key{"V", "tau0", "tau1"};
  CHECK(fine->seized.at(key) == Rat(8235, 100));
  CHECK(plan_feasible(cfg, p, *fine));
}

TEST_CASE("higher-density collateral is seized first") {
  Config cfg;
  cfg.wallets["V"][t0] = 16;
  cfg.wallets["V"][m1] = 10;
  cfg.wallets["V"][m2] = 10;
  cfg.wallets["A"][Token::lp_claim("tau0")] = 20;
  cfg.pool.minted["tau1"] = 10;
  cfg.pool.funds["tau1"] = 12;
  cfg.pool.minted["tau2"] = 10;
  cfg.pool.funds["tau2"] = Rat(105, 10);
  cfg.pool.minted["tau0"] = 20;
  cfg.pool.funds["tau0"] = 10;
  cfg.pool.loans["V"]["tau0"] = 16;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  cfg.prices["tau2"] = 1;
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  REQUIRE(collateralization(cfg, "V")->value == Rat(225, 160));

  auto heur = optimal_liquidation(cfg, p, Rat(1));
  REQUIRE(heur);
  auto oracle = optimal_liquidation_oracle(cfg, p, Rat(1));
  REQUIRE(oracle);
  CHECK(heur->seized.at({"V", "tau0", "tau1"}) == Rat(10));
  CHECK(heur->seized.at({"V", "tau0", "tau2"}) == Rat(10));
  CHECK(heur->objective == Rat(10) * (Rat(12, 10) - Rat(4, 5)) +
                               Rat(10) * (Rat(105, 100) - Rat(4, 5)));
  CHECK(oracle->objective == heur->objective);
  CHECK(plan_feasible(cfg, p, *heur));
}

TEST_CASE("two victims share a scarce fund") {
  Config cfg;
  cfg.wallets["V1"][m1] = 15;
  cfg.wallets["V2"][m1] = 15;
  cfg.wallets["W"][Token::lp_claim("tau0")] = 40;
  cfg.pool.minted["tau1"] = 30;
  cfg.pool.funds["tau1"] = 18;
  cfg.pool.minted["tau0"] = 40;
  cfg.pool.funds["tau0"] = 40;
  cfg.pool.loans["W"]["tau1"] = 18;
  cfg.pool.loans["V1"]["tau0"] = 13;
  cfg.pool.loans["V2"]["tau0"] = 14;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  REQUIRE(exchange_rate(cfg, "tau1") == Rat(12, 10));
  auto heur = optimal_liquidation(cfg, p, Rat(1));
  REQUIRE(heur);
  auto oracle = optimal_liquidation_oracle(cfg, p, Rat(1));
  REQUIRE(oracle);
  Rat total;
  for (const auto& [key, units] : heur->seized) total += units;
  CHECK(total == Rat(15));
  CHECK(heur->objective == Rat(15) * (Rat(12, 10) - Rat(4, 5)));
  CHECK(oracle->objective == heur->objective);
  CHECK(plan_feasible(cfg, p, *heur));
  CHECK(plan_feasible(cfg, p, *oracle));
}

TEST_CASE("the literal objective counts seized units over prices") {
  Config cfg = one_victim();
  cfg.prices["tau1"] = 2;
  cfg.pool.loans["V"]["tau0"] = 150;
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  auto plan = optimal_liquidation(cfg, p, Rat(1), true);
  REQUIRE(plan);
  Rat expected;
  for (const auto& [key, units] : plan->seized) {
    CHECK(key.seized == "tau1");
    expected += units / Rat(2);
  }
  CHECK(plan->objective == expected);
  auto value = plan_objective(cfg, p, *plan, true);
  REQUIRE(value);
  CHECK(*value == expected);
}

TEST_CASE("infeasible plans are rejected") {
  Config cfg = one_victim();
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  LiquidationPlan plan;
  plan.seized[{"V", "tau0", "tau1"}] = Rat(101);
  CHECK(!plan_feasible(cfg, p, plan));
  plan.seized[{"V", "tau0", "tau1"}] = Rat(83);
  CHECK(!plan_feasible(cfg, p, plan));
  plan.seized[{"V", "tau0", "tau1"}] = Rat(82);
  CHECK(plan_feasible(cfg, p, plan));
}

TEST_CASE("healthy accounts admit no liquidation plan") {
  Config cfg = one_victim();
  cfg.pool.loans["V"]["tau0"] = 40;
  LpParams p;
  p.c_min = Rat(3, 2);
  p.r_liq = Rat(5, 4);
  auto heur = optimal_liquidation(cfg, p, Rat(1));
  REQUIRE(heur);
  CHECK(heur->seized.empty());
  CHECK(heur->objective == Rat(0));
  LiquidationPlan plan;
  plan.seized[{"V", "tau0", "tau1"}] = Rat(10);
  auto r = plan_feasible(cfg, p, plan);
  CHECK(r.error().code == Errc::NotLiquidatable);
}

TEST_CASE("the oracle refuses oversized instances") {
  Config cfg;
  LpParams p;
  p.r_liq = Rat(5, 4);
  for (int i = 0; i < 4; ++i) {
    std::string v = "V" + std::to_string(i);
    cfg.wallets[v][m1] = 10;
    cfg.pool.loans[v]["tau0"] = 12;
  }
  cfg.pool.minted["tau1"] = 40;
  cfg.pool.funds["tau1"] = 40;
  cfg.pool.funds["tau0"] = 10;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  auto r = optimal_liquidation_oracle(cfg, p, Rat(1));
  CHECK(r.error().code == Errc::InstanceTooLarge);
}
