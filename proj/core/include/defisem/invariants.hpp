#pragma once

#include <string>
#include <vector>

#include "defisem/txn.hpp"

namespace defisem {

// Per-state checks: claim-token supplies equal the wallet totals (LP claims
// and AMM shares) and every stored quantity is nonnegative.
std::vector<std::string> check_state(const Config& cfg);

// Per-transition checks for a committed top-level transaction:
// - free-token conservation: wallets + pool funds + AMM reserves constant
// - exchange rates move only on interest accrual, strictly up for tokens
//   with live loans, and stay exactly equal otherwise
// - AMM: swaps preserve the reserve product exactly at fee 0 and strictly
//   grow it otherwise, and strictly lower the spot rate of the input leg;
//   deposits and redeems leave pair spot rates exactly unchanged
std::vector<std::string> check_transition(const Config& pre, const Config& post,
                                          const Tx& tx, const LpParams& params);

// Transition checks across a committed group (which admits no interest
// accrual): free-token conservation and exchange-rate constancy.
std::vector<std::string> check_group_transition(const Config& pre, const Config& post);

}  // namespace defisem
