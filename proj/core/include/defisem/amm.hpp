#pragma once

#include <set>
#include <string>

#include "defisem/state.hpp"

namespace defisem {

// [AmmDep] A supplies (v0:t0, v1:t1) and receives share tokens.
// The pair's orientation is fixed by its first deposit; a deposit quoting
// the legs in the opposite order is rejected (ReversedPair, premise 0,
// as is a non-free leg).
// 1) [soft] on a funded pair the amounts match the reserve ratio exactly:
//    v1 * r0 == v0 * r1
// 2) v0 > 0, v1 > 0, balances sufficient
// 3) t0 != t1
// A first (or refunding) deposit mints v0 shares; later deposits mint
// v0 * supply / r0.
Res<void> amm_deposit(Config& cfg, const Account& user, const Token& t0,
                      const Token& t1, const Rat& v0, const Rat& v1,
                      const RuleOpts& opts = {});

// [AmmSwap] A sends v_in of one leg and receives
// v_out = r_out * (1-f) * v_in / (r_in + (1-f) * v_in) of the other;
// reserves move to (r_in + v_in, r_out - v_out). Fee f = params.amm_fee.
// 1) a funded pair exists over {t_in, t_out}
// 2) v_in > 0, balance sufficient
Res<void> amm_swap(Config& cfg, const LpParams& params, const Account& user,
                   const Token& t_in, const Token& t_out, const Rat& v_in);

// Output amount of [AmmSwap] without applying it.
Res<Rat> amm_swap_quote(const Config& cfg, const LpParams& params,
                        const Token& t_in, const Token& t_out, const Rat& v_in);

// [AmmRdm] A burns v share tokens and receives the proportional reserves.
// 1) token is an AMM share with a live pair  2) v > 0, balance sufficient
// 3) supply >= v
Res<void> amm_redeem(Config& cfg, const Account& user, const Token& share,
                     const Rat& v);

// Spot rate: units of `quote` per unit of `base` (reserve(quote)/reserve(base)).
Res<Rat> amm_exchange_rate(const Config& cfg, const Token& base, const Token& quote);

// Execution rate of swapping v_in of `base` into `quote`, fee ignored:
// r_out / (r_in + v_in).
Res<Rat> amm_effective_rate(const Config& cfg, const Token& base,
                            const Token& quote, const Rat& v_in);

// Tokens appearing in a funded pair whose spot rate disagrees with the
// external price ratio.
std::set<std::string> arbitrage_tokens(const Config& cfg);

struct ArbStep {
  Token t_in;
  Token t_out;
  Rat amount;
  Rat profit;
};

// Picks the single most profitable swap (over all funded pairs and
// directions) aligning a pair's spot rate with the price oracle. The swap
// amount is the profit-maximizing input floored onto the grid
// 1/grid_denominator (refined x10 while the floor is 0, up to 6 extra
// digits). Applies the swap. PreconditionUnmet when no profitable swap
// exists at grid granularity.
Res<ArbStep> close_arbitrage(Config& cfg, const LpParams& params,
                             const Account& user,
                             const Int& grid_denominator = Int(1000000));

}  // namespace defisem
