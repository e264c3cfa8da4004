#pragma once

#include <optional>

#include "defisem/state.hpp"

namespace defisem {

// Lending pool transition rules. Each rule either applies its full effect or
// leaves the configuration untouched and returns the first failed premise.
// Premise indices follow the order documented above each function. Premises
// marked [soft] are value guards: with opts.enforce == false they are
// recorded through opts.sink and the rule still applies.

// [Dep] A locks v of free token t, receiving v / ER(t) claim tokens m(t).
// 1) t free  2) v > 0  3) balance(A, t) >= v
Res<void> deposit(Config& cfg, const LpParams& params, const Account& user,
                  const Rat& v, const Token& token);

// [Bor] A borrows v of free token t from the pool funds.
// 1) t free  2) v > 0  3) funds(t) >= v
// 4) [soft] post-state collateralization of A >= C_min
Res<void> borrow(Config& cfg, const LpParams& params, const Account& user,
                 const Rat& v, const Token& token, const RuleOpts& opts = {});

// [Int] one accrual step: every live loan on token t grows by factor
// (1 + rate(t)). Rates are resolved for all indebted tokens before any
// mutation, so a missing or non-positive rate aborts the whole step.
Res<void> accrue_interest(Config& cfg, const InterestRates& rates);

// [Rep] A repays v of their loan on free token t.
// 1) t free  2) v > 0  3) balance(A, t) >= v  4) loan(A, t) >= v
Res<void> repay(Config& cfg, const LpParams& params, const Account& user,
                const Rat& v, const Token& token);

// [Rdm] A burns v claim tokens m(u), receiving v * ER(u) of u.
// 1) token is an LP claim  2) v > 0  3) balance(A, m(u)) >= v
// 4) funds(u) >= v * ER(u)  5) supply(m(u)) >= v
// 6) [soft] post-state collateralization of A >= C_min when A has loans
Res<void> redeem(Config& cfg, const LpParams& params, const Account& user,
                 const Rat& v, const Token& token, const RuleOpts& opts = {});

// [Liq] liquidator A repays v of B's loan on t and seizes
// v' = v * (p(t) / p(u)) * r_liq claim tokens m(u) from B.
// 0) A != B
// 1) t free, seized token an LP claim, both priced
// 2) v >= 0 and balance(A, t) >= v
// 3) loan(B, t) >= v
// 4) balance(B, m(u)) >= v'
// 5) [soft] when v' is supplied explicitly it must equal the formula value
// 6) [soft] collateralization of B < C_min before
// 7) [soft] collateralization of B <= C_min after
Res<void> liquidate(Config& cfg, const LpParams& params, const Account& liquidator,
                    const Account& victim, const Rat& v, const Token& repaid,
                    const Token& seized, const std::optional<Rat>& seize_amount,
                    const RuleOpts& opts = {});

// Seize amount the [Liq] formula dictates for repaying v of t against m(u).
Res<Rat> liquidation_seizure(const Config& cfg, const LpParams& params,
                             const Rat& v, const Token& repaid, const Token& seized);

// [Mtrf] A sends v claim tokens to another account.
// 1) token is an LP claim  2) v >= 0  3) balance(from, token) >= v
// 4) [soft] post-state collateralization of `from` >= C_min when it has loans
Res<void> transfer_claim(Config& cfg, const LpParams& params, const Account& from,
                         const Account& to, const Rat& v, const Token& token,
                         const RuleOpts& opts = {});

// [fBorrow] uncollateralized in-group borrow of v from funds(t).
// 1) t free  2) v > 0  3) funds(t) >= v
Res<void> flash_borrow(Config& cfg, const Account& user, const Rat& v,
                       const Token& token);

// [fRepay] in-group return of v' to funds(t).
// 1) t free  2) v' > 0  3) balance(A, t) >= v'
Res<void> flash_repay(Config& cfg, const Account& user, const Rat& v,
                      const Token& token);

// [fBorrowM] in-group mint of v claim tokens m(u), diluting ER until burned.
// 1) token is an LP claim  2) v > 0
Res<void> flash_mint(Config& cfg, const Account& user, const Rat& v,
                     const Token& token);

// [fRepayM] in-group burn of exactly v claim tokens m(u), plus a fee of
// fee_amount in free token fee_token paid into the pool funds.
// 1) token an LP claim, fee token free  2) v > 0  3) balance(A, m(u)) >= v
// 4) supply(m(u)) >= v  5) balance(A, fee token) >= fee amount
// 6) [soft] fee amount > C_fee * p(fee token)
Res<void> flash_burn(Config& cfg, const LpParams& params, const Account& user,
                     const Rat& v, const Token& token, const Rat& fee_amount,
                     const Token& fee_token, const RuleOpts& opts = {});

}  // namespace defisem
