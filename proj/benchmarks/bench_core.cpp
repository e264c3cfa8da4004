#include <benchmark/benchmark.h>

#include "defisem/amm.hpp"
#include "defisem/analysis.hpp"
#include "defisem/fuzz.hpp"
#include "defisem/lending.hpp"
#include "defisem/scenario.hpp"

using namespace defisem;

namespace {

Config swap_state() {
  Config cfg;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 1;
  cfg.wallets["M"][Token::free("tau0")] = 1000000;
  cfg.wallets["M"][Token::free("tau1")] = 1000000;
  cfg.wallets["A"][Token::free("tau0")] = 1000000;
  amm_deposit(cfg, "M", Token::free("tau0"), Token::free("tau1"),
              Rat(1000000), Rat(1000000));
  return cfg;
}

void bm_amm_swap(benchmark::State& state) {
  LpParams params;
  Config base = swap_state();
  for (auto _ : state) {
    Config cfg = base;
    auto r = amm_swap(cfg, params, "A", Token::free("tau0"),
                      Token::free("tau1"), Rat(137, 10));
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_amm_swap);

void bm_interest_accrual(benchmark::State& state) {
  Config base;
  InterestRates rates;
  for (int i = 0; i < 50; ++i) {
    std::string t = "tau" + std::to_string(i);
    base.prices[t] = 1;
    base.pool.minted[t] = 1000;
    base.pool.funds[t] = 400;
    base.pool.loans["B" + std::to_string(i)][t] = 600;
    base.wallets["D"][Token::lp_claim(t)] = 1000;
    rates.constant[t] = Rat(1, 100);
  }
  for (auto _ : state) {
    Config cfg = base;
    auto r = accrue_interest(cfg, rates);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(bm_interest_accrual);

void bm_scenario_replay(benchmark::State& state) {
  auto sc = scenario_load(std::string(DEFISEM_SCENARIO_DIR) + "/table2.json");
  if (!sc) {
    state.SkipWithError("scenario load failed");
    return;
  }
  for (auto _ : state) {
    auto report = replay(*sc);
    benchmark::DoNotOptimize(report.pass);
  }
}
BENCHMARK(bm_scenario_replay);

void bm_liquidation_optimizer(benchmark::State& state) {
  Config cfg;
  cfg.prices["tau0"] = 1;
  cfg.prices["tau1"] = 2;
  cfg.prices["tau2"] = 1;
  for (const char* u : {"tau1", "tau2"}) {
    cfg.pool.minted[u] = 40;
    cfg.pool.funds[u] = 44;
  }
  for (int i = 0; i < 3; ++i) {
    Account victim = "V" + std::to_string(i);
    cfg.wallets[victim][Token::lp_claim("tau1")] = 8;
    cfg.wallets[victim][Token::lp_claim("tau2")] = 6;
    cfg.pool.loans[victim]["tau0"] = 20 + i * 3;
  }
  cfg.wallets["H"][Token::lp_claim("tau1")] = 16;
  cfg.wallets["H"][Token::lp_claim("tau2")] = 22;
  LpParams params;
  for (auto _ : state) {
    auto plan = optimal_liquidation(cfg, params, Rat(1));
    benchmark::DoNotOptimize(plan);
  }
}
BENCHMARK(bm_liquidation_optimizer);

void bm_fuzz_steps(benchmark::State& state) {
  FuzzProfile profile = lp_amm_profile();
  std::uint64_t seed = 1;
  std::size_t steps = 0;
  for (auto _ : state) {
    auto r = fuzz_run(seed++, 50, profile);
    steps += r.steps_applied;
    benchmark::DoNotOptimize(r.ok);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(bm_fuzz_steps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
