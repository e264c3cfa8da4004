#include "defisem/state.hpp"

namespace defisem {

namespace {

template <typename Map, typename Key>
Rat get_or_zero(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? Rat(0) : it->second;
}

template <typename Map, typename Key>
void add_entry(Map& m, const Key& k, const Rat& delta) {
  if (delta == 0) return;
  auto [it, inserted] = m.try_emplace(k, delta);
  if (!inserted) {
    it->second += delta;
    if (it->second == 0) m.erase(it);
  }
}

}  // namespace

Rat balance(const Config& cfg, const Account& user, const Token& token) {
  auto it = cfg.wallets.find(user);
  if (it == cfg.wallets.end()) return Rat(0);
  return get_or_zero(it->second, token);
}

void add_balance(Config& cfg, const Account& user, const Token& token, const Rat& delta) {
  if (delta == 0) return;
  auto& wallet = cfg.wallets[user];
  add_entry(wallet, token, delta);
  if (wallet.empty()) cfg.wallets.erase(user);
}

Rat pool_funds(const Config& cfg, const std::string& token) {
  return get_or_zero(cfg.pool.funds, token);
}

void add_funds(Config& cfg, const std::string& token, const Rat& delta) {
  add_entry(cfg.pool.funds, token, delta);
}

Rat claim_supply(const Config& cfg, const std::string& token) {
  return get_or_zero(cfg.pool.minted, token);
}

void add_claim_supply(Config& cfg, const std::string& token, const Rat& delta) {
  add_entry(cfg.pool.minted, token, delta);
}

Rat loan_of(const Config& cfg, const Account& user, const std::string& token) {
  auto it = cfg.pool.loans.find(user);
  if (it == cfg.pool.loans.end()) return Rat(0);
  return get_or_zero(it->second, token);
}

void add_loan(Config& cfg, const Account& user, const std::string& token, const Rat& delta) {
  if (delta == 0) return;
  auto& loans = cfg.pool.loans[user];
  add_entry(loans, token, delta);
  if (loans.empty()) cfg.pool.loans.erase(user);
}

Rat total_loans(const Config& cfg, const std::string& token) {
  Rat total(0);
  for (const auto& [user, loans] : cfg.pool.loans) {
    total += get_or_zero(loans, token);
  }
  return total;
}

std::optional<Rat> price_of(const Config& cfg, const std::string& token) {
  auto it = cfg.prices.find(token);
  if (it == cfg.prices.end()) return std::nullopt;
  return it->second;
}

std::optional<Rat> valuation_price(const Config& cfg, const std::string& token) {
  if (cfg.oracle_source == OracleSource::External || token == cfg.numeraire) {
    return price_of(cfg, token);
  }
  auto anchor = price_of(cfg, cfg.numeraire);
  if (!anchor) return price_of(cfg, token);
  if (auto it = cfg.snapshot.rates.find({token, cfg.numeraire});
      it != cfg.snapshot.rates.end()) {
    return it->second * *anchor;
  }
  if (auto it = cfg.snapshot.rates.find({cfg.numeraire, token});
      it != cfg.snapshot.rates.end() && it->second != 0) {
    return *anchor / it->second;
  }
  return price_of(cfg, token);
}

Rat exchange_rate(const Config& cfg, const std::string& token) {
  Rat supply = claim_supply(cfg, token);
  if (supply == 0) return Rat(1);
  return (pool_funds(cfg, token) + total_loans(cfg, token)) / supply;
}

Res<Rat> collateral_value(const Config& cfg, const Account& user) {
  Rat total(0);
  auto it = cfg.wallets.find(user);
  if (it == cfg.wallets.end()) return total;
  for (const auto& [token, amount] : it->second) {
    if (!token.is_lp_claim()) continue;
    auto p = valuation_price(cfg, token.a);
    if (!p) return err(Errc::MissingPrice, "", 0, token.a);
    total += amount * exchange_rate(cfg, token.a) * *p;
  }
  return total;
}

Res<Rat> loan_value(const Config& cfg, const Account& user) {
  Rat total(0);
  auto it = cfg.pool.loans.find(user);
  if (it == cfg.pool.loans.end()) return total;
  for (const auto& [token, amount] : it->second) {
    auto p = valuation_price(cfg, token);
    if (!p) return err(Errc::MissingPrice, "", 0, token);
    total += amount * *p;
  }
  return total;
}

Res<ExtRat> collateralization(const Config& cfg, const Account& user) {
  auto coll = collateral_value(cfg, user);
  if (!coll) return coll.error();
  auto loans = loan_value(cfg, user);
  if (!loans) return loans.error();
  if (*loans == 0) return ExtRat::infinity();
  return ExtRat::of(*coll / *loans);
}

Rat utilization(const Config& cfg, const std::string& token) {
  Rat loans = total_loans(cfg, token);
  Rat denom = pool_funds(cfg, token) + loans;
  if (denom == 0) return Rat(0);
  return loans / denom;
}

void snapshot_refresh(Config& cfg) {
  cfg.snapshot.rates.clear();
  for (const auto& [key, pair] : cfg.amm) {
    if (pair.r0 > 0) {
      cfg.snapshot.rates[key] = pair.r1 / pair.r0;
    }
  }
}

Res<Rat> interest_rate(const InterestRates& rates, const Config& cfg,
                       const std::string& token, long step) {
  switch (rates.kind) {
    case InterestRates::Kind::Constant: {
      auto it = rates.constant.find(token);
      if (it == rates.constant.end()) {
        return err(Errc::MissingRate, "Int", 0, token);
      }
      if (it->second <= 0) return err(Errc::NonPositiveRate, "Int", 0, token);
      return it->second;
    }
    case InterestRates::Kind::Schedule: {
      auto step_it = rates.schedule.find(step);
      if (step_it == rates.schedule.end()) {
        return err(Errc::MissingRate, "Int", 0,
                   token + " at step " + std::to_string(step));
      }
      auto it = step_it->second.find(token);
      if (it == step_it->second.end()) {
        return err(Errc::MissingRate, "Int", 0,
                   token + " at step " + std::to_string(step));
      }
      if (it->second <= 0) return err(Errc::NonPositiveRate, "Int", 0, token);
      return it->second;
    }
    case InterestRates::Kind::UtilizationLinear: {
      Rat rate = rates.base + rates.slope * utilization(cfg, token);
      if (rate <= 0) return err(Errc::NonPositiveRate, "Int", 0, token);
      return rate;
    }
  }
  return err(Errc::MissingRate, "Int", 0, token);
}

}  // namespace defisem
