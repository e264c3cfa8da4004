#pragma once

#include <map>

#include "defisem/state.hpp"

namespace defisem {

// [Trf] signer `from` sends v of a free token to `to`.
// Premises: 1) t is free  2) v >= 0  3) balance(from, t) >= v.
Res<void> transfer(Config& cfg, const Account& from, const Account& to,
                   const Rat& v, const Token& token);

// [Px] unsigned oracle update; merges the given quotes into the price map.
// Premises: 1) every quoted price is > 0.
Res<void> set_prices(Config& cfg, const std::map<std::string, Rat>& quotes);

}  // namespace defisem
