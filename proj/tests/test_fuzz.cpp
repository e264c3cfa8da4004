#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "defisem/fuzz.hpp"
#include "defisem/invariants.hpp"
#include "defisem/scenario.hpp"

using namespace defisem;

TEST_CASE("runs are deterministic per seed") {
  FuzzProfile profile = lp_only_profile();
  auto a = fuzz_run(42, 40, profile);
  auto b = fuzz_run(42, 40, profile);
  CHECK(a.ok == b.ok);
  CHECK(a.steps_applied == b.steps_applied);
  CHECK(a.trace.size() == b.trace.size());
  CHECK(a.initial == b.initial);
  CHECK(a.final_cfg == b.final_cfg);
  CHECK(a.reproducer == b.reproducer);

  auto c = fuzz_run(43, 40, profile);
  CHECK(c.initial != a.initial);
}

TEST_CASE("clean runs satisfy the invariants on both profiles") {
  for (bool amm : {false, true}) {
    FuzzProfile profile = amm ? lp_amm_profile() : lp_only_profile();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto r = fuzz_run(seed, 50, profile);
      CAPTURE(seed);
      CAPTURE(amm);
      CHECK(r.ok);
      CHECK(r.violations.empty());
      CHECK(r.steps_applied > 0);
      CHECK(check_state(r.final_cfg).empty());
    }
  }
}

TEST_CASE("captured states replay the trace") {
  FuzzProfile profile = lp_amm_profile();
  profile.capture_states = true;
  auto r = fuzz_run(7, 30, profile);
  REQUIRE(r.ok);
  REQUIRE(r.states.size() == r.steps_applied + 1);
  CHECK(r.states.front() == r.initial);
  CHECK(r.states.back() == r.final_cfg);
  for (const Config& cfg : r.states) CHECK(check_state(cfg).empty());
}

TEST_CASE("a clean trace replays to the same final state") {
  FuzzProfile profile = lp_only_profile();
  auto r = fuzz_run(11, 25, profile);
  REQUIRE(r.ok);
  CHECK(r.reproducer.empty());

  Scenario sc;
  sc.name = "trace";
  sc.params = r.params;
  sc.rates = r.rates;
  sc.initial = r.initial;
  for (const Tx& tx : r.trace) {
    ScenarioStep step;
    step.txs.push_back(tx);
    sc.steps.push_back(std::move(step));
  }
  auto parsed = scenario_from_json(scenario_to_json(sc));
  REQUIRE(parsed);
  auto report = replay(*parsed);
  CHECK(report.pass);
  CHECK(report.final_cfg == r.final_cfg);
}

TEST_CASE("shrinking keeps the failure and reaches a local minimum") {
  std::vector<Tx> trace;
  for (int i = 1; i <= 8; ++i) {
    trace.push_back(TxTrf{"A", "B", Rat(i), Token::free("tau0")});
  }
  auto amount_of = [](const Tx& tx) { return std::get<TxTrf>(tx).v; };
  TraceChecker checker = [&](const std::vector<Tx>& t) -> std::optional<std::string> {
    Rat total = 0;
    bool has_three = false;
    for (const Tx& tx : t) {
      total += amount_of(tx);
      if (amount_of(tx) == Rat(3)) has_three = true;
    }
    if (has_three && total >= 10) return "spike";
    return std::nullopt;
  };
  REQUIRE(checker(trace).has_value());
  auto shrunk = shrink_trace(trace, "spike", checker);
  REQUIRE(checker(shrunk).has_value());
  CHECK(shrunk.size() < trace.size());
  CHECK(std::any_of(shrunk.begin(), shrunk.end(),
                    [&](const Tx& tx) { return amount_of(tx) == Rat(3); }));
  for (std::size_t i = 0; i < shrunk.size(); ++i) {
    std::vector<Tx> without = shrunk;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    auto again = checker(without);
    CHECK(!(again.has_value() && *again == "spike"));
  }
}

TEST_CASE("shrinking returns the trace unchanged when nothing can go") {
  std::vector<Tx> trace{TxTrf{"A", "B", Rat(1), Token::free("tau0")},
                        TxTrf{"A", "B", Rat(2), Token::free("tau0")}};
  TraceChecker checker = [](const std::vector<Tx>& t) -> std::optional<std::string> {
    return t.size() == 2 ? std::optional<std::string>("pair") : std::nullopt;
  };
  auto shrunk = shrink_trace(trace, "pair", checker);
  CHECK(shrunk.size() == 2);
}
