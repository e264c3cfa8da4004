#include "defisem/attacks.hpp"

#include <algorithm>

#include "defisem/amm.hpp"
#include "defisem/analysis.hpp"
#include "defisem/ledger.hpp"
#include "defisem/lending.hpp"

namespace defisem {

const char* attack_kind_str(AttackKind kind) {
  switch (kind) {
    case AttackKind::PriceOracle: return "price-oracle";
    case AttackKind::OverUtilization: return "over-utilization";
    case AttackKind::Sandwich: return "sandwich";
    case AttackKind::Arbitrage: return "arbitrage";
    case AttackKind::RepayCensorship: return "repay-censorship";
  }
  return "?";
}

std::optional<AttackKind> attack_kind_parse(const std::string& name) {
  for (AttackKind kind :
       {AttackKind::PriceOracle, AttackKind::OverUtilization, AttackKind::Sandwich,
        AttackKind::Arbitrage, AttackKind::RepayCensorship}) {
    if (name == attack_kind_str(kind)) return kind;
  }
  return std::nullopt;
}

namespace {

Res<AttackTrace> finish_trace(AttackKind kind, const Config& initial, Config final_cfg,
                              std::vector<Tx> steps, const Account& attacker,
                              const std::optional<Account>& victim) {
  AttackTrace trace;
  trace.kind = kind;
  trace.steps = std::move(steps);
  auto before = net_worth(initial, attacker);
  if (!before) return before.error();
  auto after = net_worth(final_cfg, attacker);
  if (!after) return after.error();
  trace.attacker_gain = *after - *before;
  trace.victim_loss = 0;
  if (victim) {
    auto v_before = net_worth(initial, *victim);
    if (!v_before) return v_before.error();
    auto v_after = net_worth(final_cfg, *victim);
    if (!v_after) return v_after.error();
    trace.victim_loss = *v_before - *v_after;
  }
  trace.final_cfg = std::move(final_cfg);
  return trace;
}

Res<void> replay_steps(Config& cfg, const LpParams& params, const InterestRates& rates,
                       const std::vector<Tx>& steps) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (auto r = apply_tx(cfg, params, rates, steps[i]); !r) {
      return err(Errc::PreconditionUnmet, "attack", 0,
                 "step " + std::to_string(i) + " (" + tx_str(steps[i]) +
                     "): " + r.error().str());
    }
  }
  return {};
}

}  // namespace

Res<AttackTrace> gen_price_oracle_attack(const Config& cfg, const LpParams& params,
                                         const Account& attacker,
                                         const Account& victim, const Rat& eps) {
  if (eps <= 0) return err(Errc::NonPositivePrice, "attack", 0, rat_str(eps));
  if (attacker == victim) return err(Errc::SameAccount, "attack", 0, attacker);

  auto loans_it = cfg.pool.loans.find(victim);
  if (loans_it == cfg.pool.loans.end() || loans_it->second.empty()) {
    return err(Errc::PreconditionUnmet, "attack", 0, victim + " has no loan");
  }

  std::vector<std::pair<std::string, Rat>> claims;
  if (auto wit = cfg.wallets.find(victim); wit != cfg.wallets.end()) {
    for (const auto& [token, amount] : wit->second) {
      if (token.is_lp_claim() && amount > 0) claims.emplace_back(token.a, amount);
    }
  }
  if (claims.empty()) {
    return err(Errc::PreconditionUnmet, "attack", 0, victim + " has no collateral");
  }

  std::map<std::string, Rat> crashed;
  std::map<std::string, Rat> restored;
  for (const auto& [under, amount] : claims) {
    (void)amount;
    if (loan_of(cfg, victim, under) > 0) continue;
    auto original = price_of(cfg, under);
    if (!original) return err(Errc::MissingPrice, "attack", 0, under);
    crashed[under] = eps;
    restored[under] = *original;
  }
  if (crashed.empty()) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               "every collateral underlying is also owed by " + victim);
  }

  std::string repaid;
  Rat repaid_value(-1);
  for (const auto& [token, owed] : loans_it->second) {
    if (owed <= 0) continue;
    if (balance(cfg, attacker, Token::free(token)) <= 0) continue;
    auto p = price_of(cfg, token);
    if (!p) return err(Errc::MissingPrice, "attack", 0, token);
    if (owed * *p > repaid_value) {
      repaid = token;
      repaid_value = owed * *p;
    }
  }
  if (repaid.empty()) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               attacker + " holds none of the victim's loan tokens");
  }
  auto p_repaid = price_of(cfg, repaid);

  std::vector<Tx> steps;
  steps.push_back(TxPx{crashed});
  Rat total_repaid(0);
  for (const auto& [under, amount] : claims) {
    if (!crashed.count(under)) continue;
    Rat v = amount * eps / (*p_repaid * params.r_liq);
    total_repaid += v;
    steps.push_back(TxLiq{attacker, victim, v, Token::free(repaid),
                          Token::lp_claim(under), amount});
  }
  steps.push_back(TxPx{restored});

  if (balance(cfg, attacker, Token::free(repaid)) < total_repaid) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               attacker + " cannot fund the repayments");
  }

  Config work = cfg;
  {
    Config probe = cfg;
    if (auto r = set_prices(probe, crashed); !r) return r.error();
    auto coll = collateralization(probe, victim);
    if (!coll) return coll.error();
    if (!(*coll < ExtRat::of(params.c_min))) {
      return err(Errc::PreconditionUnmet, "attack", 0,
                 "crash leaves " + victim + " at coll " + ext_str(*coll));
    }
  }
  InterestRates no_rates;
  if (auto r = replay_steps(work, params, no_rates, steps); !r) return r.error();
  return finish_trace(AttackKind::PriceOracle, cfg, std::move(work), std::move(steps),
                      attacker, victim);
}

Res<AttackTrace> gen_over_utilization_attack(const Config& cfg, const LpParams& params,
                                             const OverUtilizationArgs& args) {
  const Rat& x = args.deposit;
  if (x <= 0) return err(Errc::NonPositiveAmount, "attack", 0, rat_str(x));
  if (args.target == args.collateral) {
    return err(Errc::SameToken, "attack", 0, args.target);
  }
  if (pool_funds(cfg, args.target) != 0 || claim_supply(cfg, args.target) != 0 ||
      total_loans(cfg, args.target) != 0) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               "pool already active in " + args.target);
  }

  Rat z = args.victim ? args.victim_deposit : Rat(0);
  Rat borrow = args.victim ? z : Rat(x / 2);
  if (borrow <= 0 || borrow > x) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               "borrow " + rat_str(borrow) + " outside (0, " + rat_str(x) + "]");
  }

  auto p_target = price_of(cfg, args.target);
  if (!p_target) return err(Errc::MissingPrice, "attack", 0, args.target);
  auto p_coll = price_of(cfg, args.collateral);
  if (!p_coll) return err(Errc::MissingPrice, "attack", 0, args.collateral);
  Rat collateral_in = params.c_min * borrow * *p_target / *p_coll;

  std::vector<Tx> steps;
  steps.push_back(TxDep{args.attacker, x, Token::free(args.target)});
  steps.push_back(TxDep{args.accomplice, collateral_in, Token::free(args.collateral)});
  steps.push_back(TxBor{args.accomplice, borrow, Token::free(args.target)});
  if (args.victim) steps.push_back(TxDep{*args.victim, z, Token::free(args.target)});
  steps.push_back(TxRdm{args.attacker, x - borrow + z, Token::lp_claim(args.target)});

  Config work = cfg;
  InterestRates no_rates;
  if (auto r = replay_steps(work, params, no_rates, steps); !r) return r.error();
  if (utilization(work, args.target) != 1) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               "final utilization " + rat_str(utilization(work, args.target)));
  }

  AttackTrace trace;
  trace.kind = AttackKind::OverUtilization;
  trace.steps = std::move(steps);
  trace.attacker_gain = 0;
  trace.victim_loss = args.victim ? Rat(z * *p_target) : Rat(0);
  trace.final_cfg = std::move(work);
  return trace;
}

Res<AttackTrace> gen_sandwich_attack(const Config& cfg, const LpParams& params,
                                     const Account& attacker,
                                     const TxAmmSwap& victim_swap, const Rat& probe) {
  if (probe < 0) return err(Errc::NegativeAmount, "attack", 0, rat_str(probe));
  const Token& t_in = victim_swap.t_in;
  const Token& t_out = victim_swap.t_out;

  Rat x_max = std::min(probe, balance(cfg, attacker, t_in));
  Rat best_x(0);
  Rat best_gain(0);
  std::optional<Rat> best_y;

  auto simulate = [&](const Rat& x) -> Res<void> {
    Config trial = cfg;
    Rat y(0);
    if (x > 0) {
      auto quote = amm_swap_quote(trial, params, t_in, t_out, x);
      if (!quote) return quote.error();
      y = *quote;
      if (auto r = amm_swap(trial, params, attacker, t_in, t_out, x); !r) {
        return r.error();
      }
    }
    if (victim_swap.v_in > 0) {
      if (auto r = apply_tx(trial, params, InterestRates{}, Tx{victim_swap}); !r) {
        return r.error();
      }
    }
    Rat back(0);
    if (x > 0) {
      auto quote = amm_swap_quote(trial, params, t_out, t_in, y);
      if (!quote) return quote.error();
      back = *quote;
    }
    Rat gain = back - x;
    if (gain > best_gain) {
      best_gain = gain;
      best_x = x;
      best_y = y;
    }
    return {};
  };

  if (auto r = simulate(Rat(0)); !r) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               "victim swap does not apply: " + r.error().str());
  }
  if (x_max > 0) {
    for (int k = 1; k <= 64; ++k) {
      Rat x = x_max * k / 64;
      if (auto r = simulate(x); !r) return r.error();
    }
  }

  std::vector<Tx> steps;
  if (best_x > 0) steps.push_back(TxAmmSwap{attacker, t_in, t_out, best_x});
  if (victim_swap.v_in > 0) steps.push_back(victim_swap);
  if (best_x > 0) steps.push_back(TxAmmSwap{attacker, t_out, t_in, *best_y});

  Rat solo_out(0);
  if (victim_swap.v_in > 0) {
    auto quote = amm_swap_quote(cfg, params, t_in, t_out, victim_swap.v_in);
    if (!quote) return quote.error();
    solo_out = *quote;
  }

  Config work = cfg;
  InterestRates no_rates;
  if (auto r = replay_steps(work, params, no_rates, steps); !r) return r.error();

  AttackTrace trace;
  trace.kind = AttackKind::Sandwich;
  trace.steps = std::move(steps);
  trace.attacker_gain = balance(work, attacker, t_in) - balance(cfg, attacker, t_in);
  trace.victim_loss = 0;
  if (victim_swap.v_in > 0) {
    Rat actual_out =
        balance(work, victim_swap.user, t_out) - balance(cfg, victim_swap.user, t_out);
    auto p_out = valuation_price(cfg, t_out.a);
    if (!p_out) return err(Errc::MissingPrice, "attack", 0, t_out.a);
    trace.victim_loss = (solo_out - actual_out) * *p_out;
  }
  trace.final_cfg = std::move(work);
  return trace;
}

Res<AttackTrace> gen_arbitrage_attack(const Config& cfg, const LpParams& params,
                                      const Account& attacker,
                                      const Int& grid_denominator) {
  Config work = cfg;
  auto step = close_arbitrage(work, params, attacker, grid_denominator);
  if (!step) return step.error();

  std::vector<Tx> steps;
  steps.push_back(TxAmmSwap{attacker, step->t_in, step->t_out, step->amount});
  return finish_trace(AttackKind::Arbitrage, cfg, std::move(work), std::move(steps),
                      attacker, std::nullopt);
}

Res<AttackTrace> gen_repay_censorship_attack(const Config& cfg, const LpParams& params,
                                             const InterestRates& rates,
                                             const Account& attacker,
                                             const Account& victim, int max_accruals) {
  if (attacker == victim) return err(Errc::SameAccount, "attack", 0, attacker);
  auto loans = loan_value(cfg, victim);
  if (!loans) return loans.error();
  if (*loans <= 0) {
    return err(Errc::PreconditionUnmet, "attack", 0, victim + " has no loan");
  }

  Config work = cfg;
  std::vector<Tx> steps;
  bool liquidatable = false;
  for (int i = 0; i < max_accruals; ++i) {
    auto coll = collateralization(work, victim);
    if (!coll) return coll.error();
    if (*coll < ExtRat::of(params.c_min)) {
      liquidatable = true;
      break;
    }
    if (auto r = apply_tx(work, params, rates, Tx{TxInt{}}); !r) return r.error();
    steps.push_back(TxInt{});
  }
  if (!liquidatable) {
    return err(Errc::PreconditionUnmet, "attack", 0,
               victim + " never drops below C_min within " +
                   std::to_string(max_accruals) + " accruals");
  }

  auto plan = optimal_liquidation(work, params, Rat(1, 1000000));
  if (!plan) return plan.error();
  for (const auto& [key, seized] : plan->seized) {
    if (key.victim != victim || seized <= 0) continue;
    auto p_repaid = valuation_price(work, key.repaid);
    if (!p_repaid) return err(Errc::MissingPrice, "attack", 0, key.repaid);
    auto p_under = valuation_price(work, key.seized);
    if (!p_under) return err(Errc::MissingPrice, "attack", 0, key.seized);
    Rat v = seized * *p_under / (*p_repaid * params.r_liq);
    if (balance(work, attacker, Token::free(key.repaid)) < v) continue;
    Tx liq = TxLiq{attacker, victim, v, Token::free(key.repaid),
                   Token::lp_claim(key.seized), seized};
    if (auto r = apply_tx(work, params, rates, liq); !r) continue;
    steps.push_back(liq);
  }

  return finish_trace(AttackKind::RepayCensorship, cfg, std::move(work),
                      std::move(steps), attacker, victim);
}

}  // namespace defisem
