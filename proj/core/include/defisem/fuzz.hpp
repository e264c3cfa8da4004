#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "defisem/txn.hpp"

namespace defisem {

// Shape of a random run: account/token counts, enabled transaction kinds
// (by weight), and whether pool parameters and rates are drawn per seed.
// Drawn parameters stay inside the proven interest envelope: per-step rates
// at most 10%, r_liq at least 1.15, C_min in (r_liq, 2 r_liq].
struct FuzzProfile {
  int users = 3;
  int tokens = 2;
  bool amm = false;
  bool capture_states = false;
  bool randomize_params = true;
  LpParams params;
  InterestRates rates;
  std::map<std::string, int> weights;
};

FuzzProfile lp_only_profile();
FuzzProfile lp_amm_profile();

struct FuzzResult {
  bool ok = true;
  std::uint64_t seed = 0;
  std::size_t steps_applied = 0;
  std::vector<std::string> violations;
  std::string violation_category;
  std::vector<Tx> trace;
  Config initial;
  Config final_cfg;
  LpParams params;
  InterestRates rates;
  std::vector<Config> states;
  std::string reproducer;
};

// Generates `steps` random applicable transactions from a seeded genesis
// state, checking the state and transition invariants after every commit.
// On a violation the trace is greedily minimized (the reproducer scenario
// still fails the same check) and returned in `trace`/`reproducer`.
// Deterministic per (seed, steps, profile).
FuzzResult fuzz_run(std::uint64_t seed, int steps, const FuzzProfile& profile);

// Returns the violation category when the trace still fails, nullopt when
// it passes.
using TraceChecker =
    std::function<std::optional<std::string>(const std::vector<Tx>&)>;

// Greedy single-step removal to a local minimum: drops any transaction
// whose removal keeps the checker failing with the same category.
std::vector<Tx> shrink_trace(std::vector<Tx> trace, const std::string& category,
                             const TraceChecker& fails_with);

}  // namespace defisem
