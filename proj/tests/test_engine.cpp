#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "defisem/engine.hpp"
#include "defisem/lending.hpp"

using namespace defisem;

namespace {

Token t0 = Token::free("tau0");
Token t1 = Token::free("tau1");
Token m0 = Token::lp_claim("tau0");

NetworkState funded() {
  NetworkState ns;
  ns.cfg.wallets["A"][t0] = 100;
  ns.cfg.wallets["A"][t1] = 100;
  ns.cfg.wallets["B"][t0] = 100;
  ns.cfg.wallets["B"][t1] = 100;
  ns.cfg.prices["tau0"] = 1;
  ns.cfg.prices["tau1"] = 1;
  ns.rates.constant = {{"tau0", Rat(5, 100)}, {"tau1", Rat(5, 100)}};
  return ns;
}

Tx dep(const Account& u, int v) { return TxDep{u, Rat(v), t0}; }

}  // namespace

TEST_CASE("signed transactions need a live matching authorization") {
  NetworkState ns = funded();
  Tx tx = dep("A", 10);
  CHECK(execute_tx(ns, tx).error().code == Errc::NotAuthorized);
  REQUIRE(announce(ns, Auth{tx}));
  REQUIRE(execute_tx(ns, tx));
  CHECK(balance(ns.cfg, "A", m0) == Rat(10));
  SUBCASE("single-use is consumed by the commit") {
    CHECK(execute_tx(ns, tx).error().code == Errc::NotAuthorized);
    CHECK(ns.auths.size() == 1);
    CHECK(ns.auths[0].used);
  }
  SUBCASE("re-announcing an identical authorization is a no-op") {
    REQUIRE(announce(ns, Auth{tx}));
    CHECK(ns.auths.size() == 1);
    CHECK(execute_tx(ns, tx).error().code == Errc::NotAuthorized);
  }
  SUBCASE("a fresh equal authorization works again") {
    REQUIRE(announce(ns, Auth{tx, Pred::truth(), true}));
    CHECK(ns.auths.size() == 2);
    REQUIRE(execute_tx(ns, tx));
    REQUIRE(execute_tx(ns, tx));
    CHECK(balance(ns.cfg, "A", m0) == Rat(30));
  }
}

TEST_CASE("unsigned transactions run without authorization") {
  NetworkState ns = funded();
  REQUIRE(execute_tx(ns, Tx{TxPx{{{"tau0", Rat(2)}}}}));
  CHECK(*price_of(ns.cfg, "tau0") == Rat(2));
  REQUIRE(announce(ns, Auth{dep("A", 10)}));
  REQUIRE(execute_tx(ns, dep("A", 10)));
  REQUIRE(announce(ns, Auth{Tx{TxBor{"A", Rat(5), t0}}}));
  REQUIRE(execute_tx(ns, Tx{TxBor{"A", Rat(5), t0}}));
  REQUIRE(execute_tx(ns, Tx{TxInt{}}));
  CHECK(loan_of(ns.cfg, "A", "tau0") == Rat(5) * Rat(105, 100));
}

TEST_CASE("predicates guard execution time, not announcement time") {
  NetworkState ns = funded();
  Tx tx = dep("A", 10);
  Pred cheap = Pred::cmp(CmpOp::Lt, Expr::price("tau0"), Expr::constant(Rat(3, 2)));
  REQUIRE(announce(ns, Auth{tx, cheap}));
  REQUIRE(execute_tx(ns, Tx{TxPx{{{"tau0", Rat(2)}}}}));
  CHECK(execute_tx(ns, tx).error().code == Errc::PredicateFalse);
  REQUIRE(execute_tx(ns, Tx{TxPx{{{"tau0", Rat(1)}}}}));
  REQUIRE(execute_tx(ns, tx));
}

TEST_CASE("consumed authorizations report differently from false predicates") {
  NetworkState ns = funded();
  Tx tx = dep("A", 10);
  REQUIRE(announce(ns, Auth{tx}));
  REQUIRE(execute_tx(ns, tx));
  CHECK(execute_tx(ns, tx).error().code == Errc::NotAuthorized);
  Pred never = Pred::falsity();
  REQUIRE(announce(ns, Auth{tx, never}));
  CHECK(execute_tx(ns, tx).error().code == Errc::PredicateFalse);
}

TEST_CASE("authorizations must carry a signer") {
  NetworkState ns = funded();
  CHECK(announce(ns, Auth{Tx{TxInt{}}}).error().code == Errc::InvalidAuthorization);
  CHECK(announce(ns, Auth{Tx{TxPx{}}}).error().code == Errc::InvalidAuthorization);
}

TEST_CASE("predicate evaluation") {
  NetworkState ns = funded();
  LpParams p;
  REQUIRE(deposit(ns.cfg, p, "A", Rat(50), t0));
  REQUIRE(deposit(ns.cfg, p, "B", Rat(50), t1));
  REQUIRE(borrow(ns.cfg, p, "B", Rat(20), t0));
  Pred coll_ok = Pred::cmp(CmpOp::Ge, Expr::coll_of("B"), Expr::constant(Rat(2)));
  auto v = eval_pred(ns.cfg, coll_ok);
  REQUIRE(v);
  CHECK(*v == true);
  Pred util_low =
      Pred::cmp(CmpOp::Lt, Expr::util("tau0"), Expr::constant(Rat(1, 4)));
  auto u = eval_pred(ns.cfg, util_low);
  REQUIRE(u);
  CHECK(*u == false);
  Pred both = Pred::conj(coll_ok, Pred::negate(util_low));
  auto b = eval_pred(ns.cfg, both);
  REQUIRE(b);
  CHECK(*b == true);
  Pred er_one =
      Pred::cmp(CmpOp::Eq, Expr::exch_rate("tau0", "tau0"), Expr::constant(Rat(1)));
  CHECK(*eval_pred(ns.cfg, er_one));
  Pred coll_inf = Pred::cmp(CmpOp::Gt, Expr::coll_of("A"), Expr::constant(Rat(1000)));
  CHECK(*eval_pred(ns.cfg, coll_inf));
}

TEST_CASE("groups are atomic and share one signer") {
  NetworkState ns = funded();
  std::vector<Tx> txs = {dep("A", 10), Tx{TxBor{"A", Rat(5), t0}}};
  CHECK(execute_group(ns, txs).error().code == Errc::NotAuthorized);
  REQUIRE(announce_group(ns, GroupAuth{txs}));
  REQUIRE(execute_group(ns, txs));
  CHECK(balance(ns.cfg, "A", m0) == Rat(10));
  CHECK(balance(ns.cfg, "A", t0) == Rat(95));

  SUBCASE("a failing member rolls the whole group back") {
    std::vector<Tx> bad = {dep("A", 10), Tx{TxBor{"A", Rat(1000), t0}}};
    REQUIRE(announce_group(ns, GroupAuth{bad}));
    Config before = ns.cfg;
    auto r = execute_group(ns, bad);
    CHECK(r.error().code == Errc::GroupAborted);
    CHECK(r.error().rule == "Bor");
    CHECK(ns.cfg == before);
  }
  SUBCASE("mixed signers are rejected") {
    std::vector<Tx> mixed = {dep("A", 10), dep("B", 10)};
    CHECK(announce_group(ns, GroupAuth{mixed}).error().code == Errc::MixedSigners);
  }
  SUBCASE("unsigned members are rejected") {
    std::vector<Tx> with_int = {dep("A", 10), Tx{TxInt{}}};
    CHECK(announce_group(ns, GroupAuth{with_int}).error().code ==
          Errc::UnsignedInGroup);
  }
  SUBCASE("empty groups are rejected") {
    CHECK(announce_group(ns, GroupAuth{std::vector<Tx>{}}).error().code ==
          Errc::EmptyGroup);
  }
}

TEST_CASE("flash transactions are illegal at the top level") {
  NetworkState ns = funded();
  Tx fb = Tx{TxFBorrow{"A", Rat(10), t0}};
  REQUIRE(announce(ns, Auth{fb}));
  CHECK(execute_tx(ns, fb).error().code == Errc::FlashOutsideGroup);
}

TEST_CASE("flash borrows must be repaid with the fee inside the group") {
  NetworkState ns = funded();
  ns.params.flash_fee = Rat(1, 100);
  LpParams p = ns.params;
  REQUIRE(deposit(ns.cfg, p, "B", Rat(100), t0));
  Rat fee = Rat(50) * Rat(1, 100);
  std::vector<Tx> good = {Tx{TxFBorrow{"A", Rat(50), t0}},
                          Tx{TxFRepay{"A", Rat(50) + fee, t0}}};
  REQUIRE(announce_group(ns, GroupAuth{good}));
  Config before = ns.cfg;
  REQUIRE(execute_group(ns, good));
  CHECK(pool_funds(ns.cfg, "tau0") == Rat(100) + fee);
  CHECK(balance(ns.cfg, "A", t0) == Rat(100) - fee);

  SUBCASE("an unmatched borrow aborts") {
    std::vector<Tx> open = {Tx{TxFBorrow{"A", Rat(10), t0}},
                            Tx{TxTrf{"A", "B", Rat(1), t0}}};
    REQUIRE(announce_group(ns, GroupAuth{open}));
    Config pre = ns.cfg;
    CHECK(execute_group(ns, open).error().code == Errc::UnmatchedFlashBorrow);
    CHECK(ns.cfg == pre);
  }
  SUBCASE("an unmatched repay aborts") {
    std::vector<Tx> stray = {Tx{TxFRepay{"A", Rat(10), t0}},
                             Tx{TxTrf{"A", "B", Rat(1), t0}}};
    REQUIRE(announce_group(ns, GroupAuth{stray}));
    Config pre = ns.cfg;
    CHECK(execute_group(ns, stray).error().code == Errc::UnmatchedFlashRepay);
    CHECK(ns.cfg == pre);
  }
  SUBCASE("an underpaid fee aborts") {
    std::vector<Tx> cheap = {Tx{TxFBorrow{"A", Rat(50), t0}},
                             Tx{TxFRepay{"A", Rat(50), t0}}};
    REQUIRE(announce_group(ns, GroupAuth{cheap}));
    Config pre = ns.cfg;
    CHECK(execute_group(ns, cheap).error().code == Errc::FeeTooLow);
    CHECK(ns.cfg == pre);
  }
}

TEST_CASE("interleaved flash borrows match first in first out") {
  NetworkState ns = funded();
  LpParams p = ns.params;
  REQUIRE(deposit(ns.cfg, p, "B", Rat(100), t0));
  REQUIRE(deposit(ns.cfg, p, "B", Rat(100), t1));
  std::vector<Tx> nested = {
      Tx{TxFBorrow{"A", Rat(30), t0}}, Tx{TxFBorrow{"A", Rat(20), t1}},
      Tx{TxFRepay{"A", Rat(20), t1}}, Tx{TxFRepay{"A", Rat(30), t0}}};
  REQUIRE(announce_group(ns, GroupAuth{nested}));
  Config before = ns.cfg;
  REQUIRE(execute_group(ns, nested));
  CHECK(ns.cfg.wallets == before.wallets);
  CHECK(ns.cfg.pool == before.pool);
}

TEST_CASE("flash mints must burn exactly the minted amount plus a fee") {
  NetworkState ns = funded();
  ns.params.flash_fee = Rat(0);
  LpParams p = ns.params;
  REQUIRE(deposit(ns.cfg, p, "B", Rat(100), t0));
  Rat fee = Rat(1, 1000);
  std::vector<Tx> good = {Tx{TxFMint{"A", Rat(40), m0}},
                          Tx{TxFBurn{"A", Rat(40), m0, fee, t0}}};
  REQUIRE(announce_group(ns, GroupAuth{good}));
  REQUIRE(execute_group(ns, good));
  CHECK(claim_supply(ns.cfg, "tau0") == Rat(100));
  CHECK(pool_funds(ns.cfg, "tau0") == Rat(100) + fee);
  CHECK(balance(ns.cfg, "A", t0) == Rat(100) - fee);
  CHECK(balance(ns.cfg, "A", m0) == Rat(0));

  SUBCASE("a partial burn aborts") {
    std::vector<Tx> partial = {Tx{TxFMint{"A", Rat(40), m0}},
                               Tx{TxFBurn{"A", Rat(30), m0, fee, t0}}};
    REQUIRE(announce_group(ns, GroupAuth{partial}));
    Config pre = ns.cfg;
    CHECK(execute_group(ns, partial).error().code == Errc::FlashRepayMismatch);
    CHECK(ns.cfg == pre);
  }
  SUBCASE("an unburned mint aborts") {
    std::vector<Tx> open = {Tx{TxFMint{"A", Rat(40), m0}},
                            Tx{TxTrf{"A", "B", Rat(1), t0}}};
    REQUIRE(announce_group(ns, GroupAuth{open}));
    Config pre = ns.cfg;
    CHECK(execute_group(ns, open).error().code == Errc::UnmatchedFlashBorrow);
    CHECK(ns.cfg == pre);
  }
  SUBCASE("a zero fee aborts at the burn") {
    std::vector<Tx> free_ride = {Tx{TxFMint{"A", Rat(40), m0}},
                                 Tx{TxFBurn{"A", Rat(40), m0, Rat(0), t0}}};
    REQUIRE(announce_group(ns, GroupAuth{free_ride}));
    Config pre = ns.cfg;
    auto r = execute_group(ns, free_ride);
    CHECK(r.error().code == Errc::GroupAborted);
    CHECK(r.error().rule == "fRepayM");
    CHECK(r.error().premise == 6);
    CHECK(ns.cfg == pre);
  }
}

TEST_CASE("flash validation checks sequences without running them") {
  NetworkState ns = funded();
  LpParams p = ns.params;
  std::vector<Tx> good = {Tx{TxFBorrow{"A", Rat(10), t0}},
                          Tx{TxFRepay{"A", Rat(10), t0}}};
  CHECK(validate_flash_obligations(ns.cfg, p, good));
  std::vector<Tx> open = {Tx{TxFBorrow{"A", Rat(10), t0}}};
  CHECK(validate_flash_obligations(ns.cfg, p, open).error().code ==
        Errc::UnmatchedFlashBorrow);
}

TEST_CASE("scheduling policies") {
  NetworkState ns = funded();
  std::vector<ScheduleEntry> entries;
  entries.push_back({{dep("A", 10)}});
  entries.push_back({{dep("B", 20)}});
  SUBCASE("fifo runs everything in order") {
    SchedulePlan plan;
    auto items = schedule(ns, plan, entries);
    REQUIRE(items.size() == 2);
    CHECK(items[0].executed);
    CHECK(items[1].executed);
    CHECK(claim_supply(ns.cfg, "tau0") == Rat(30));
  }
  SUBCASE("drop censors the victim") {
    SchedulePlan plan;
    plan.policy = OrderingPolicy::Drop;
    plan.dropped = {0};
    auto items = schedule(ns, plan, entries);
    CHECK(!items[0].executed);
    CHECK(items[1].executed);
    CHECK(balance(ns.cfg, "A", m0) == Rat(0));
  }
  SUBCASE("reorder permutes execution") {
    SchedulePlan plan;
    plan.policy = OrderingPolicy::Reorder;
    plan.order = {1, 0};
    auto items = schedule(ns, plan, entries);
    CHECK(items[0].executed);
    CHECK(items[1].executed);
    CHECK(claim_supply(ns.cfg, "tau0") == Rat(30));
  }
}
