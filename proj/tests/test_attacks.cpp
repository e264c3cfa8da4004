#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "defisem/amm.hpp"
#include "defisem/attacks.hpp"
#include "defisem/lending.hpp"

using namespace defisem;

namespace {

Config lending_genesis() {
  Config cfg;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  cfg.wallets["D"][Token::lp_claim("tau0")] = 100;
  cfg.wallets["V"][Token::lp_claim("tau1")] = 100;
  cfg.wallets["A"][Token::free("tau0")] = 200;
  cfg.pool.minted["tau0"] = 100;
  cfg.pool.minted["tau1"] = 100;
  cfg.pool.funds["tau0"] = 34;
  cfg.pool.funds["tau1"] = 100;
  cfg.pool.loans["V"]["tau0"] = 66;
  return cfg;
}

int count_kind(const std::vector<Tx>& steps, const std::string& kind) {
  return static_cast<int>(std::count_if(steps.begin(), steps.end(), [&](const Tx& tx) {
    return tx_kind(tx) == kind;
  }));
}

}  // namespace

TEST_CASE("attack kind names round trip") {
  for (AttackKind kind :
       {AttackKind::PriceOracle, AttackKind::OverUtilization, AttackKind::Sandwich,
        AttackKind::Arbitrage, AttackKind::RepayCensorship}) {
    auto parsed = attack_kind_parse(attack_kind_str(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK(!attack_kind_parse("flash-everything"));
}

TEST_CASE("price crash liquidates a healthy borrower and restores the quote") {
  Config cfg = lending_genesis();
  LpParams params;
  REQUIRE(*collateralization(cfg, "V") >= ExtRat::of(params.c_min));

  auto trace = gen_price_oracle_attack(cfg, params, "A", "V");
  REQUIRE(trace);
  CHECK(trace->attacker_gain > 0);
  CHECK(trace->victim_loss > 0);
  CHECK(count_kind(trace->steps, "Px") == 2);
  CHECK(count_kind(trace->steps, "Liq") == 1);
  CHECK(trace->final_cfg.prices == cfg.prices);
  CHECK(balance(trace->final_cfg, "A", Token::lp_claim("tau1")) == Rat(100));
  CHECK(balance(trace->final_cfg, "V", Token::lp_claim("tau1")) == Rat(0));
  CHECK(loan_of(trace->final_cfg, "V", "tau0") > 0);
}

TEST_CASE("price crash preconditions") {
  Config cfg = lending_genesis();
  LpParams params;
  CHECK(gen_price_oracle_attack(cfg, params, "A", "A").error().code ==
        Errc::SameAccount);
  CHECK(gen_price_oracle_attack(cfg, params, "A", "D").error().code ==
        Errc::PreconditionUnmet);

  Config self = cfg;
  self.wallets["V"].erase(Token::lp_claim("tau1"));
  self.wallets["V"][Token::lp_claim("tau0")] = 100;
  self.pool.minted["tau1"] = 0;
  self.pool.minted["tau0"] = 200;
  auto r = gen_price_oracle_attack(self, params, "A", "V");
  REQUIRE(!r);
  CHECK(r.error().code == Errc::PreconditionUnmet);
}

TEST_CASE("deposit and redeem around a borrow locks the pool at full utilization") {
  Config cfg;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  cfg.wallets["X"][Token::free("tau0")] = 200;
  cfg.wallets["Y"][Token::free("tau1")] = 300;
  cfg.wallets["C"][Token::free("tau0")] = 30;
  LpParams params;

  OverUtilizationArgs args;
  args.attacker = "X";
  args.accomplice = "Y";
  args.target = "tau0";
  args.collateral = "tau1";
  args.deposit = 100;
  args.victim = "C";
  args.victim_deposit = 30;

  auto trace = gen_over_utilization_attack(cfg, params, args);
  REQUIRE(trace);
  CHECK(trace->attacker_gain == 0);
  CHECK(trace->victim_loss == Rat(30));
  CHECK(utilization(trace->final_cfg, "tau0") == Rat(1));
  CHECK(pool_funds(trace->final_cfg, "tau0") == Rat(0));
  CHECK(balance(trace->final_cfg, "X", Token::free("tau0")) == Rat(200));
  CHECK(balance(trace->final_cfg, "C", Token::lp_claim("tau0")) == Rat(30));

  Config locked = trace->final_cfg;
  auto stuck = redeem(locked, params, "C", Rat(30), Token::lp_claim("tau0"));
  REQUIRE(!stuck);
  CHECK(stuck.error().code == Errc::InsufficientPoolFunds);

  args.victim.reset();
  auto solo = gen_over_utilization_attack(cfg, params, args);
  REQUIRE(solo);
  CHECK(solo->victim_loss == 0);
  CHECK(utilization(solo->final_cfg, "tau0") == Rat(1));

  Config active = cfg;
  active.pool.funds["tau0"] = 1;
  auto refused = gen_over_utilization_attack(active, params, args);
  REQUIRE(!refused);
  CHECK(refused.error().code == Errc::PreconditionUnmet);
}

TEST_CASE("a sandwich brackets the victim swap at a profit") {
  Config cfg;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  cfg.wallets["A"][Token::free("tau0")] = 100;
  cfg.wallets["A"][Token::free("tau1")] = 100;
  cfg.wallets["B"][Token::free("tau0")] = 50;
  cfg.wallets["C"][Token::free("tau0")] = 50;
  LpParams params;
  REQUIRE(amm_deposit(cfg, "A", Token::free("tau0"), Token::free("tau1"),
                      Rat(100), Rat(100)));

  TxAmmSwap victim{"B", Token::free("tau0"), Token::free("tau1"), Rat(50)};
  auto trace = gen_sandwich_attack(cfg, params, "C", victim, Rat(50));
  REQUIRE(trace);
  CHECK(trace->attacker_gain > 0);
  CHECK(trace->victim_loss > 0);
  REQUIRE(trace->steps.size() == 3);
  CHECK(tx_kind(trace->steps[0]) == "AmmSwap");
  CHECK(std::get<TxAmmSwap>(trace->steps[1]).user == "B");
  CHECK(balance(trace->final_cfg, "C", Token::free("tau1")) ==
        balance(cfg, "C", Token::free("tau1")));
  CHECK(balance(trace->final_cfg, "C", Token::free("tau0")) ==
        Rat(50) + trace->attacker_gain);

  TxAmmSwap nothing{"B", Token::free("tau0"), Token::free("tau1"), Rat(0)};
  auto idle = gen_sandwich_attack(cfg, params, "C", nothing, Rat(50));
  REQUIRE(idle);
  CHECK(idle->attacker_gain == 0);
  CHECK(idle->victim_loss == 0);
  CHECK(idle->steps.empty());

  auto broke = gen_sandwich_attack(cfg, params, "D", victim, Rat(50));
  REQUIRE(broke);
  CHECK(broke->attacker_gain == 0);
  CHECK(broke->victim_loss == 0);
  REQUIRE(broke->steps.size() == 1);
}

TEST_CASE("arbitrage aligns the pair with the oracle at a profit") {
  Config cfg;
  cfg.prices["tau0"] = 2;
  cfg.prices["tau1"] = 1;
  cfg.wallets["A"][Token::free("tau0")] = 100;
  cfg.wallets["A"][Token::free("tau1")] = 100;
  cfg.wallets["Z"][Token::free("tau1")] = 100;
  LpParams params;
  REQUIRE(amm_deposit(cfg, "A", Token::free("tau0"), Token::free("tau1"),
                      Rat(100), Rat(100)));

  Rat oracle_ratio = Rat(2);
  Rat spot_before = *amm_exchange_rate(cfg, Token::free("tau0"), Token::free("tau1"));
  Rat gap_before = oracle_ratio - spot_before;
  REQUIRE(gap_before > 0);

  auto trace = gen_arbitrage_attack(cfg, params, "Z");
  REQUIRE(trace);
  CHECK(trace->attacker_gain > 0);
  REQUIRE(trace->steps.size() == 1);
  const auto& swap = std::get<TxAmmSwap>(trace->steps[0]);
  CHECK(swap.t_in == Token::free("tau1"));
  CHECK(swap.t_out == Token::free("tau0"));

  Rat spot_after =
      *amm_exchange_rate(trace->final_cfg, Token::free("tau0"), Token::free("tau1"));
  Rat gap_after = oracle_ratio - spot_after;
  CHECK(gap_after >= 0);
  CHECK(gap_after < gap_before);

  Config aligned;
  aligned.prices["tau0"] = 1;
  aligned.prices["tau1"] = 1;
  aligned.wallets["A"][Token::free("tau0")] = 100;
  aligned.wallets["A"][Token::free("tau1")] = 100;
  aligned.wallets["Z"][Token::free("tau1")] = 100;
  REQUIRE(amm_deposit(aligned, "A", Token::free("tau0"), Token::free("tau1"),
                      Rat(100), Rat(100)));
  CHECK(!gen_arbitrage_attack(aligned, params, "Z"));
}

TEST_CASE("withheld repayments let interest push the borrower under water") {
  Config cfg = lending_genesis();
  LpParams params;
  InterestRates rates;
  rates.kind = InterestRates::Kind::Constant;
  rates.constant["tau0"] = Rat(2, 5);
  REQUIRE(*collateralization(cfg, "V") >= ExtRat::of(params.c_min));

  auto trace = gen_repay_censorship_attack(cfg, params, rates, "A", "V");
  REQUIRE(trace);
  CHECK(count_kind(trace->steps, "Int") == 1);
  CHECK(count_kind(trace->steps, "Liq") == 1);
  CHECK(trace->attacker_gain == Rat(100, 11));
  CHECK(trace->victim_loss > 0);
  CHECK(balance(trace->final_cfg, "A", Token::lp_claim("tau1")) == Rat(100));
  CHECK(loan_of(trace->final_cfg, "V", "tau0") == Rat(82, 55));

  auto no_loan = gen_repay_censorship_attack(cfg, params, rates, "A", "D");
  REQUIRE(!no_loan);
  CHECK(no_loan.error().code == Errc::PreconditionUnmet);
}
