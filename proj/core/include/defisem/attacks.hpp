#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defisem/txn.hpp"

namespace defisem {

enum class AttackKind {
  PriceOracle,
  OverUtilization,
  Sandwich,
  Arbitrage,
  RepayCensorship,
};

const char* attack_kind_str(AttackKind kind);
std::optional<AttackKind> attack_kind_parse(const std::string& name);

// A concrete transaction sequence together with its replayed outcome.
// Gains and losses are valued at the prices of the final configuration.
struct AttackTrace {
  AttackKind kind;
  std::vector<Tx> steps;
  Rat attacker_gain;
  Rat victim_loss;
  Config final_cfg;
};

// Crashes the prices of the victim's collateral underlyings that the victim
// does not also owe, seizes every claim with the minimal repayments the
// seizure formula permits, and restores the original prices.
Res<AttackTrace> gen_price_oracle_attack(const Config& cfg, const LpParams& params,
                                         const Account& attacker,
                                         const Account& victim,
                                         const Rat& eps = Rat(1) / 1000000);

struct OverUtilizationArgs {
  Account attacker;
  Account accomplice;
  std::string target;
  std::string collateral;
  Rat deposit;
  std::optional<Account> victim;
  Rat victim_deposit = 0;
};

// On a pool with no prior activity in the target token: the attacker
// deposits, the accomplice borrows against fresh collateral, an optional
// victim deposits, and the attacker redeems every withdrawable unit,
// leaving utilization at 1 and the victim's deposit locked.
Res<AttackTrace> gen_over_utilization_attack(const Config& cfg, const LpParams& params,
                                             const OverUtilizationArgs& args);

// Brackets the victim's swap with a same-direction swap and a reverse swap
// of exactly the acquired amount. The attacker leg is chosen by grid search
// over 64 steps up to `probe` (capped by the attacker's balance).
Res<AttackTrace> gen_sandwich_attack(const Config& cfg, const LpParams& params,
                                     const Account& attacker,
                                     const TxAmmSwap& victim_swap, const Rat& probe);

// Performs the most profitable single swap aligning an AMM pair with the
// price oracle.
Res<AttackTrace> gen_arbitrage_attack(const Config& cfg, const LpParams& params,
                                      const Account& attacker,
                                      const Int& grid_denominator = Int(1000000));

// Models withholding the victim's repayments: interest accrues until the
// victim is liquidatable, then the attacker extracts the optimal seizure.
Res<AttackTrace> gen_repay_censorship_attack(const Config& cfg, const LpParams& params,
                                             const InterestRates& rates,
                                             const Account& attacker,
                                             const Account& victim,
                                             int max_accruals = 1000);

}  // namespace defisem
