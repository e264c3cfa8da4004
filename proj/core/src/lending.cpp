#include "defisem/lending.hpp"

#include <vector>

namespace defisem {

namespace {

bool has_loans(const Config& cfg, const Account& user) {
  auto it = cfg.pool.loans.find(user);
  return it != cfg.pool.loans.end() && !it->second.empty();
}

// Collateralization guard on the post state of a rule. Returns the failed
// premise's error in enforce mode, otherwise reports and lets the rule stand.
Res<void> guard_min_coll(const Config& cfg, const LpParams& params,
                         const Account& user, const char* rule, int premise,
                         const RuleOpts& opts) {
  auto coll = collateralization(cfg, user);
  if (!coll) return coll.error();
  if (*coll >= ExtRat::of(params.c_min)) return {};
  std::string detail = user + " coll " + ext_str(*coll) + " < " + rat_str(params.c_min);
  if (opts.enforce) return err(Errc::Undercollateralized, rule, premise, detail);
  opts.report(rule, premise, detail);
  return {};
}

}  // namespace

Res<void> deposit(Config& cfg, const LpParams&, const Account& user,
                  const Rat& v, const Token& token) {
  if (!token.is_free()) return err(Errc::NotFree, "Dep", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "Dep", 2, rat_str(v));
  if (balance(cfg, user, token) < v) {
    return err(Errc::InsufficientBalance, "Dep", 3, user + " " + token.str());
  }
  Rat minted = v / exchange_rate(cfg, token.a);
  add_balance(cfg, user, token, -v);
  add_balance(cfg, user, Token::lp_claim(token.a), minted);
  add_funds(cfg, token.a, v);
  add_claim_supply(cfg, token.a, minted);
  return {};
}

Res<void> borrow(Config& cfg, const LpParams& params, const Account& user,
                 const Rat& v, const Token& token, const RuleOpts& opts) {
  if (!token.is_free()) return err(Errc::NotFree, "Bor", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "Bor", 2, rat_str(v));
  if (pool_funds(cfg, token.a) < v) {
    return err(Errc::InsufficientPoolFunds, "Bor", 3, token.str());
  }
  Config saved = cfg;
  add_funds(cfg, token.a, -v);
  add_balance(cfg, user, token, v);
  add_loan(cfg, user, token.a, v);
  if (auto guard = guard_min_coll(cfg, params, user, "Bor", 4, opts); !guard) {
    cfg = std::move(saved);
    return guard.error();
  }
  return {};
}

Res<void> accrue_interest(Config& cfg, const InterestRates& rates) {
  long step = cfg.interest_epoch + 1;
  std::map<std::string, Rat> factors;
  for (const auto& [user, loans] : cfg.pool.loans) {
    (void)user;
    for (const auto& [token, amount] : loans) {
      if (amount <= 0 || factors.count(token)) continue;
      auto rate = interest_rate(rates, cfg, token, step);
      if (!rate) return rate.error();
      factors.emplace(token, Rat(1) + *rate);
    }
  }
  for (auto& [user, loans] : cfg.pool.loans) {
    (void)user;
    for (auto& [token, amount] : loans) {
      if (auto it = factors.find(token); it != factors.end()) amount *= it->second;
    }
  }
  cfg.interest_epoch = step;
  return {};
}

Res<void> repay(Config& cfg, const LpParams&, const Account& user,
                const Rat& v, const Token& token) {
  if (!token.is_free()) return err(Errc::NotFree, "Rep", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "Rep", 2, rat_str(v));
  if (balance(cfg, user, token) < v) {
    return err(Errc::InsufficientBalance, "Rep", 3, user + " " + token.str());
  }
  if (loan_of(cfg, user, token.a) < v) {
    return err(Errc::InsufficientLoan, "Rep", 4, user + " " + token.str());
  }
  add_balance(cfg, user, token, -v);
  add_funds(cfg, token.a, v);
  add_loan(cfg, user, token.a, -v);
  return {};
}

Res<void> redeem(Config& cfg, const LpParams& params, const Account& user,
                 const Rat& v, const Token& token, const RuleOpts& opts) {
  if (!token.is_lp_claim()) return err(Errc::NotClaim, "Rdm", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "Rdm", 2, rat_str(v));
  if (balance(cfg, user, token) < v) {
    return err(Errc::InsufficientBalance, "Rdm", 3, user + " " + token.str());
  }
  const std::string& u = token.a;
  Rat rate = exchange_rate(cfg, u);
  Rat out = v * rate;
  if (pool_funds(cfg, u) < out) {
    return err(Errc::InsufficientPoolFunds, "Rdm", 4, u);
  }
  if (claim_supply(cfg, u) < v) {
    return err(Errc::InsufficientSupply, "Rdm", 5, token.str());
  }
  Config saved = cfg;
  add_balance(cfg, user, token, -v);
  add_balance(cfg, user, Token::free(u), out);
  add_funds(cfg, u, -out);
  add_claim_supply(cfg, u, -v);
  if (has_loans(cfg, user)) {
    if (auto guard = guard_min_coll(cfg, params, user, "Rdm", 6, opts); !guard) {
      cfg = std::move(saved);
      return guard.error();
    }
  }
  return {};
}

Res<Rat> liquidation_seizure(const Config& cfg, const LpParams& params,
                             const Rat& v, const Token& repaid, const Token& seized) {
  auto p_repaid = valuation_price(cfg, repaid.a);
  if (!p_repaid) return err(Errc::MissingPrice, "Liq", 1, repaid.str());
  auto p_under = valuation_price(cfg, seized.a);
  if (!p_under) return err(Errc::MissingPrice, "Liq", 1, seized.a);
  return v * (*p_repaid / *p_under) * params.r_liq;
}

Res<void> liquidate(Config& cfg, const LpParams& params, const Account& liquidator,
                    const Account& victim, const Rat& v, const Token& repaid,
                    const Token& seized, const std::optional<Rat>& seize_amount,
                    const RuleOpts& opts) {
  if (liquidator == victim) return err(Errc::SameAccount, "Liq", 0, liquidator);
  if (!repaid.is_free()) return err(Errc::NotFree, "Liq", 1, repaid.str());
  if (!seized.is_lp_claim()) return err(Errc::NotClaim, "Liq", 1, seized.str());
  auto formula = liquidation_seizure(cfg, params, v, repaid, seized);
  if (!formula) return formula.error();
  if (v < 0) return err(Errc::NegativeAmount, "Liq", 2, rat_str(v));
  if (balance(cfg, liquidator, repaid) < v) {
    return err(Errc::InsufficientBalance, "Liq", 2, liquidator + " " + repaid.str());
  }
  if (loan_of(cfg, victim, repaid.a) < v) {
    return err(Errc::InsufficientLoan, "Liq", 3, victim + " " + repaid.str());
  }
  Rat seize = *formula;
  if (seize_amount && *seize_amount != *formula) {
    std::string detail = "given " + rat_str(*seize_amount) + " formula " + rat_str(*formula);
    if (opts.enforce) return err(Errc::SeizeMismatch, "Liq", 5, detail);
    opts.report("Liq", 5, detail);
    seize = *seize_amount;
  }
  if (balance(cfg, victim, seized) < seize) {
    return err(Errc::InsufficientBalance, "Liq", 4, victim + " " + seized.str());
  }
  auto coll_before = collateralization(cfg, victim);
  if (!coll_before) return coll_before.error();
  if (!(*coll_before < ExtRat::of(params.c_min))) {
    std::string detail = victim + " coll " + ext_str(*coll_before);
    if (opts.enforce) return err(Errc::NotLiquidatable, "Liq", 6, detail);
    opts.report("Liq", 6, detail);
  }
  Config saved = cfg;
  add_balance(cfg, liquidator, repaid, -v);
  add_balance(cfg, liquidator, seized, seize);
  add_balance(cfg, victim, seized, -seize);
  add_loan(cfg, victim, repaid.a, -v);
  add_funds(cfg, repaid.a, v);
  auto coll_after = collateralization(cfg, victim);
  if (!coll_after) {
    cfg = std::move(saved);
    return coll_after.error();
  }
  if (!(*coll_after <= ExtRat::of(params.c_min))) {
    std::string detail = victim + " coll " + ext_str(*coll_after);
    if (opts.enforce) {
      cfg = std::move(saved);
      return err(Errc::Overliquidation, "Liq", 7, detail);
    }
    opts.report("Liq", 7, detail);
  }
  return {};
}

Res<void> transfer_claim(Config& cfg, const LpParams& params, const Account& from,
                         const Account& to, const Rat& v, const Token& token,
                         const RuleOpts& opts) {
  if (!token.is_lp_claim()) return err(Errc::NotClaim, "Mtrf", 1, token.str());
  if (v < 0) return err(Errc::NegativeAmount, "Mtrf", 2, rat_str(v));
  if (balance(cfg, from, token) < v) {
    return err(Errc::InsufficientBalance, "Mtrf", 3, from + " " + token.str());
  }
  Config saved = cfg;
  add_balance(cfg, from, token, -v);
  add_balance(cfg, to, token, v);
  if (has_loans(cfg, from)) {
    if (auto guard = guard_min_coll(cfg, params, from, "Mtrf", 4, opts); !guard) {
      cfg = std::move(saved);
      return guard.error();
    }
  }
  return {};
}

Res<void> flash_borrow(Config& cfg, const Account& user, const Rat& v,
                       const Token& token) {
  if (!token.is_free()) return err(Errc::NotFree, "fBorrow", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "fBorrow", 2, rat_str(v));
  if (pool_funds(cfg, token.a) < v) {
    return err(Errc::InsufficientPoolFunds, "fBorrow", 3, token.str());
  }
  add_funds(cfg, token.a, -v);
  add_balance(cfg, user, token, v);
  return {};
}

Res<void> flash_repay(Config& cfg, const Account& user, const Rat& v,
                      const Token& token) {
  if (!token.is_free()) return err(Errc::NotFree, "fRepay", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "fRepay", 2, rat_str(v));
  if (balance(cfg, user, token) < v) {
    return err(Errc::InsufficientBalance, "fRepay", 3, user + " " + token.str());
  }
  add_balance(cfg, user, token, -v);
  add_funds(cfg, token.a, v);
  return {};
}

Res<void> flash_mint(Config& cfg, const Account& user, const Rat& v,
                     const Token& token) {
  if (!token.is_lp_claim()) return err(Errc::NotClaim, "fBorrowM", 1, token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "fBorrowM", 2, rat_str(v));
  add_balance(cfg, user, token, v);
  add_claim_supply(cfg, token.a, v);
  return {};
}

Res<void> flash_burn(Config& cfg, const LpParams& params, const Account& user,
                     const Rat& v, const Token& token, const Rat& fee_amount,
                     const Token& fee_token, const RuleOpts& opts) {
  if (!token.is_lp_claim()) return err(Errc::NotClaim, "fRepayM", 1, token.str());
  if (!fee_token.is_free()) return err(Errc::NotFree, "fRepayM", 1, fee_token.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "fRepayM", 2, rat_str(v));
  if (balance(cfg, user, token) < v) {
    return err(Errc::InsufficientBalance, "fRepayM", 3, user + " " + token.str());
  }
  if (claim_supply(cfg, token.a) < v) {
    return err(Errc::InsufficientSupply, "fRepayM", 4, token.str());
  }
  if (fee_amount < 0 || balance(cfg, user, fee_token) < fee_amount) {
    return err(Errc::InsufficientBalance, "fRepayM", 5, user + " " + fee_token.str());
  }
  auto p_fee = valuation_price(cfg, fee_token.a);
  if (!p_fee) return err(Errc::MissingPrice, "fRepayM", 6, fee_token.str());
  if (!(fee_amount > params.flash_fee * *p_fee)) {
    std::string detail = "fee " + rat_str(fee_amount) + " needs > " +
                         rat_str(params.flash_fee * *p_fee);
    if (opts.enforce) return err(Errc::FeeTooLow, "fRepayM", 6, detail);
    opts.report("fRepayM", 6, detail);
  }
  add_balance(cfg, user, token, -v);
  add_claim_supply(cfg, token.a, -v);
  add_balance(cfg, user, fee_token, -fee_amount);
  add_funds(cfg, fee_token.a, fee_amount);
  return {};
}

}  // namespace defisem
