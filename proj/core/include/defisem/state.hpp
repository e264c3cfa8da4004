#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "defisem/errors.hpp"
#include "defisem/rational.hpp"
#include "defisem/tokens.hpp"

namespace defisem {

using Account = std::string;
using PairKey = std::pair<std::string, std::string>;

struct LpParams {
  Rat c_min = Rat(3, 2);
  Rat r_liq = Rat(11, 10);
  Rat flash_fee = Rat(0);
  Rat amm_fee = Rat(0);

  friend bool operator==(const LpParams&, const LpParams&) = default;
};

// Lending pool: funds and claim supply are keyed by the underlying free
// token's name; loans by borrower, then token name. Zero entries are erased.
struct LpState {
  std::map<std::string, Rat> funds;
  std::map<std::string, Rat> minted;
  std::map<Account, std::map<std::string, Rat>> loans;

  friend bool operator==(const LpState&, const LpState&) = default;
};

struct PairState {
  Rat r0;
  Rat r1;
  Rat supply;

  friend bool operator==(const PairState&, const PairState&) = default;
};

// Spot exchange rates per stored pair orientation, captured at the last
// top-level commit. rate((t0,t1)) = r1/r0.
struct Snapshot {
  std::map<PairKey, Rat> rates;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

enum class OracleSource : unsigned char { External, AmmSnapshot };

struct InterestRates {
  enum class Kind : unsigned char { Constant, Schedule, UtilizationLinear };

  Kind kind = Kind::Constant;
  std::map<std::string, Rat> constant;
  std::map<long, std::map<std::string, Rat>> schedule;
  Rat base = Rat(0);
  Rat slope = Rat(0);

  friend bool operator==(const InterestRates&, const InterestRates&) = default;
};

struct Config {
  std::map<Account, std::map<Token, Rat>> wallets;
  LpState pool;
  std::map<PairKey, PairState> amm;
  std::map<std::string, Rat> prices;
  Snapshot snapshot;
  OracleSource oracle_source = OracleSource::External;
  std::string numeraire;
  long interest_epoch = 0;

  friend bool operator==(const Config&, const Config&) = default;
};

Rat balance(const Config& cfg, const Account& user, const Token& token);
void add_balance(Config& cfg, const Account& user, const Token& token, const Rat& delta);

Rat pool_funds(const Config& cfg, const std::string& token);
void add_funds(Config& cfg, const std::string& token, const Rat& delta);

Rat claim_supply(const Config& cfg, const std::string& token);
void add_claim_supply(Config& cfg, const std::string& token, const Rat& delta);

Rat loan_of(const Config& cfg, const Account& user, const std::string& token);
void add_loan(Config& cfg, const Account& user, const std::string& token, const Rat& delta);
Rat total_loans(const Config& cfg, const std::string& token);

std::optional<Rat> price_of(const Config& cfg, const std::string& token);

// The price used for collateral and loan valuation. With oracle_source ==
// AmmSnapshot the numeraire keeps its external price and every other token
// is priced through the snapshotted pair rate against the numeraire,
// falling back to the external oracle when no such pair exists.
std::optional<Rat> valuation_price(const Config& cfg, const std::string& token);

// Exchange rate of the claim token m(t): 1 when no claims are outstanding,
// otherwise (funds(t) + total loans of t) / supply(m(t)).
Rat exchange_rate(const Config& cfg, const std::string& token);

Res<Rat> collateral_value(const Config& cfg, const Account& user);
Res<Rat> loan_value(const Config& cfg, const Account& user);
Res<ExtRat> collateralization(const Config& cfg, const Account& user);

// loans / (funds + loans); 0 when the token has no funds and no loans.
Rat utilization(const Config& cfg, const std::string& token);

void snapshot_refresh(Config& cfg);

// Per-step interest rate lookup. Only called for tokens with live loans.
// step is the 1-based ordinal of the accrual being applied.
Res<Rat> interest_rate(const InterestRates& rates, const Config& cfg,
                       const std::string& token, long step);

}  // namespace defisem
