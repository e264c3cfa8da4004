#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "defisem/state.hpp"

namespace defisem {

struct TxTrf {
  Account from;
  Account to;
  Rat v;
  Token token;
  friend bool operator==(const TxTrf&, const TxTrf&) = default;
};

struct TxPx {
  std::map<std::string, Rat> quotes;
  friend bool operator==(const TxPx&, const TxPx&) = default;
};

struct TxDep {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxDep&, const TxDep&) = default;
};

struct TxBor {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxBor&, const TxBor&) = default;
};

struct TxInt {
  friend bool operator==(const TxInt&, const TxInt&) = default;
};

struct TxRep {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxRep&, const TxRep&) = default;
};

struct TxRdm {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxRdm&, const TxRdm&) = default;
};

struct TxLiq {
  Account liquidator;
  Account victim;
  Rat v;
  Token repaid;
  Token seized;
  std::optional<Rat> seize_amount;
  friend bool operator==(const TxLiq&, const TxLiq&) = default;
};

struct TxMtrf {
  Account from;
  Account to;
  Rat v;
  Token token;
  friend bool operator==(const TxMtrf&, const TxMtrf&) = default;
};

struct TxAmmDep {
  Account user;
  Token t0;
  Token t1;
  Rat v0;
  Rat v1;
  friend bool operator==(const TxAmmDep&, const TxAmmDep&) = default;
};

struct TxAmmSwap {
  Account user;
  Token t_in;
  Token t_out;
  Rat v_in;
  friend bool operator==(const TxAmmSwap&, const TxAmmSwap&) = default;
};

struct TxAmmRdm {
  Account user;
  Token share;
  Rat v;
  friend bool operator==(const TxAmmRdm&, const TxAmmRdm&) = default;
};

struct TxFBorrow {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxFBorrow&, const TxFBorrow&) = default;
};

struct TxFRepay {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxFRepay&, const TxFRepay&) = default;
};

struct TxFMint {
  Account user;
  Rat v;
  Token token;
  friend bool operator==(const TxFMint&, const TxFMint&) = default;
};

struct TxFBurn {
  Account user;
  Rat v;
  Token token;
  Rat fee_amount;
  Token fee_token;
  friend bool operator==(const TxFBurn&, const TxFBurn&) = default;
};

using Tx = std::variant<TxTrf, TxPx, TxDep, TxBor, TxInt, TxRep, TxRdm, TxLiq,
                        TxMtrf, TxAmmDep, TxAmmSwap, TxAmmRdm, TxFBorrow,
                        TxFRepay, TxFMint, TxFBurn>;

// Px and Int carry no signature; everything else is signed by the acting
// account (the sender for transfers, the liquidator for liquidations).
std::optional<Account> signer_of(const Tx& tx);

bool is_flash(const Tx& tx);
bool is_unsigned(const Tx& tx);

const char* tx_kind(const Tx& tx);
std::string tx_str(const Tx& tx);

Res<void> apply_tx(Config& cfg, const LpParams& params, const InterestRates& rates,
                   const Tx& tx, const RuleOpts& opts = {});

}  // namespace defisem
