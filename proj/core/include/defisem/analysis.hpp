#pragma once

#include <map>
#include <optional>

#include "defisem/state.hpp"

namespace defisem {

// Net worth of a user over the lending-pool vocabulary: for every free
// token t, (balance(t) + balance(m(t)) * ER(t) - loan(t)) * p(t).
// AMM share tokens are outside this measure.
Res<Rat> net_worth(const Config& cfg, const Account& user);

// Loan value that liquidation cannot recover: loanVal - collVal / r_liq
// when the account's collateralization is below r_liq, else 0.
Res<Rat> nr_loan_value(const Config& cfg, const LpParams& params, const Account& user);

struct UserSafety {
  ExtRat coll = ExtRat::infinity();
  Rat coll_val;
  Rat loan_val;
  Rat nr_loan_val;
};

struct SafetyReport {
  // Share of total loan value owed by accounts below C_min.
  Rat epsilon_ratio;
  // Share of total loan value that is non-recoverable.
  Rat strong_epsilon_ratio;
  std::map<Account, UserSafety> per_user;
};

Res<SafetyReport> safety_report(const Config& cfg, const LpParams& params);

// One liquidation-plan cell: seize claim tokens m(seized) from victim by
// repaying their loan on `repaid`.
struct SeizeKey {
  Account victim;
  std::string repaid;
  std::string seized;

  friend auto operator<=>(const SeizeKey&, const SeizeKey&) = default;
};

struct LiquidationPlan {
  std::map<SeizeKey, Rat> seized;
  Rat objective;
};

// The five constraint families a plan must satisfy:
// 1. victims are liquidatable (Coll < C_min)
// 2. per victim, total seized claim value (ER * p) <= collateral value
// 3. per (victim, repaid token), seized value at underlying prices
//    <= loan * p(repaid) * r_liq
// 4. per (victim, seized token), seized units <= victim's claim balance
// 5. per seized token, funds(underlying) cover redeeming the seized claims:
//    sum of seized * ER <= funds
Res<void> plan_feasible(const Config& cfg, const LpParams& params,
                        const LiquidationPlan& plan);

// Default objective: net extractable value, sum over cells of
// seized * p(underlying) * (ER(underlying) - 1 / r_liq). The literal
// objective divides seized units by the underlying price instead.
Res<Rat> plan_objective(const Config& cfg, const LpParams& params,
                        const LiquidationPlan& plan, bool literal_objective = false);

// Greedy allocation over per-unit value density with cap-aware rebalancing.
// Allocations are multiples of `granularity`.
Res<LiquidationPlan> optimal_liquidation(const Config& cfg, const LpParams& params,
                                         const Rat& granularity,
                                         bool literal_objective = false);

// Exhaustive branch-and-bound over the grid; the reference optimum for
// small instances (<= 3 victims, <= 2 distinct cell shapes per victim
// beyond which InstanceTooLarge is returned, <= 20 grid points per cell).
Res<LiquidationPlan> optimal_liquidation_oracle(const Config& cfg,
                                                const LpParams& params,
                                                const Rat& granularity,
                                                bool literal_objective = false);

}  // namespace defisem
