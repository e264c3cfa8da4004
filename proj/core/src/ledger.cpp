#include "defisem/ledger.hpp"

namespace defisem {

Res<void> transfer(Config& cfg, const Account& from, const Account& to,
                   const Rat& v, const Token& token) {
  if (!token.is_free()) return err(Errc::NotFree, "Trf", 1, token.str());
  if (v < 0) return err(Errc::NegativeAmount, "Trf", 2, rat_str(v));
  if (balance(cfg, from, token) < v) {
    return err(Errc::InsufficientBalance, "Trf", 3, from + " " + token.str());
  }
  add_balance(cfg, from, token, -v);
  add_balance(cfg, to, token, v);
  return {};
}

Res<void> set_prices(Config& cfg, const std::map<std::string, Rat>& quotes) {
  for (const auto& [token, p] : quotes) {
    if (p <= 0) return err(Errc::NonPositivePrice, "Px", 1, token);
  }
  for (const auto& [token, p] : quotes) {
    cfg.prices[token] = p;
  }
  return {};
}

}  // namespace defisem
