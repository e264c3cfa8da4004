#include "defisem/amm.hpp"

#include <optional>

namespace defisem {

namespace {

struct PairRef {
  PairKey key;
  bool reversed = false;
};

std::optional<PairRef> find_pair(const Config& cfg, const std::string& a,
                                 const std::string& b) {
  if (cfg.amm.count({a, b})) return PairRef{{a, b}, false};
  if (cfg.amm.count({b, a})) return PairRef{{b, a}, true};
  return std::nullopt;
}

bool funded(const PairState& pair) { return pair.r0 > 0 && pair.r1 > 0; }

}  // namespace

Res<void> amm_deposit(Config& cfg, const Account& user, const Token& t0,
                      const Token& t1, const Rat& v0, const Rat& v1,
                      const RuleOpts& opts) {
  if (!t0.is_free() || !t1.is_free()) {
    return err(Errc::NotFree, "AmmDep", 0, t0.str() + "," + t1.str());
  }
  if (t0 == t1) return err(Errc::SameToken, "AmmDep", 3, t0.str());
  if (cfg.amm.count({t1.a, t0.a})) {
    return err(Errc::ReversedPair, "AmmDep", 0, t1.a + "," + t0.a);
  }
  if (v0 <= 0 || v1 <= 0) return err(Errc::NonPositiveAmount, "AmmDep", 2);
  if (balance(cfg, user, t0) < v0) {
    return err(Errc::InsufficientBalance, "AmmDep", 2, user + " " + t0.str());
  }
  if (balance(cfg, user, t1) < v1) {
    return err(Errc::InsufficientBalance, "AmmDep", 2, user + " " + t1.str());
  }
  PairState& pair = cfg.amm[{t0.a, t1.a}];
  Rat minted;
  if (funded(pair)) {
    if (v1 * pair.r0 != v0 * pair.r1) {
      std::string detail = "v1/v0 " + rat_str(v1 / v0) + " reserves " +
                           rat_str(pair.r1 / pair.r0);
      if (opts.enforce) return err(Errc::RatioMismatch, "AmmDep", 1, detail);
      opts.report("AmmDep", 1, detail);
    }
    minted = pair.supply > 0 ? Rat(v0 * pair.supply / pair.r0) : v0;
  } else {
    minted = v0;
  }
  add_balance(cfg, user, t0, -v0);
  add_balance(cfg, user, t1, -v1);
  add_balance(cfg, user, Token::amm_share(t0.a, t1.a), minted);
  pair.r0 += v0;
  pair.r1 += v1;
  pair.supply += minted;
  return {};
}

Res<Rat> amm_swap_quote(const Config& cfg, const LpParams& params,
                        const Token& t_in, const Token& t_out, const Rat& v_in) {
  if (!t_in.is_free() || !t_out.is_free()) {
    return err(Errc::NotFree, "AmmSwap", 1, t_in.str() + "," + t_out.str());
  }
  auto ref = find_pair(cfg, t_in.a, t_out.a);
  if (!ref) return err(Errc::UnknownPair, "AmmSwap", 1, t_in.a + "," + t_out.a);
  const PairState& pair = cfg.amm.at(ref->key);
  if (!funded(pair)) return err(Errc::UnfundedPair, "AmmSwap", 1, t_in.a + "," + t_out.a);
  if (v_in <= 0) return err(Errc::NonPositiveAmount, "AmmSwap", 2, rat_str(v_in));
  if (params.amm_fee < 0 || params.amm_fee >= 1) {
    return err(Errc::InvalidScenario, "AmmSwap", 0, "fee " + rat_str(params.amm_fee));
  }
  Rat r_in = ref->reversed ? pair.r1 : pair.r0;
  Rat r_out = ref->reversed ? pair.r0 : pair.r1;
  Rat w = (Rat(1) - params.amm_fee) * v_in;
  return Rat(r_out * w / (r_in + w));
}

Res<void> amm_swap(Config& cfg, const LpParams& params, const Account& user,
                   const Token& t_in, const Token& t_out, const Rat& v_in) {
  auto quote = amm_swap_quote(cfg, params, t_in, t_out, v_in);
  if (!quote) return quote.error();
  if (balance(cfg, user, t_in) < v_in) {
    return err(Errc::InsufficientBalance, "AmmSwap", 2, user + " " + t_in.str());
  }
  auto ref = find_pair(cfg, t_in.a, t_out.a);
  PairState& pair = cfg.amm.at(ref->key);
  add_balance(cfg, user, t_in, -v_in);
  add_balance(cfg, user, t_out, *quote);
  if (ref->reversed) {
    pair.r1 += v_in;
    pair.r0 -= *quote;
  } else {
    pair.r0 += v_in;
    pair.r1 -= *quote;
  }
  return {};
}

Res<void> amm_redeem(Config& cfg, const Account& user, const Token& share,
                     const Rat& v) {
  if (!share.is_amm_share()) return err(Errc::NotClaim, "AmmRdm", 1, share.str());
  auto it = cfg.amm.find({share.a, share.b});
  if (it == cfg.amm.end()) return err(Errc::UnknownPair, "AmmRdm", 1, share.str());
  if (v <= 0) return err(Errc::NonPositiveAmount, "AmmRdm", 2, rat_str(v));
  if (balance(cfg, user, share) < v) {
    return err(Errc::InsufficientBalance, "AmmRdm", 2, user + " " + share.str());
  }
  PairState& pair = it->second;
  if (pair.supply < v) return err(Errc::InsufficientSupply, "AmmRdm", 3, share.str());
  Rat out0 = v * pair.r0 / pair.supply;
  Rat out1 = v * pair.r1 / pair.supply;
  add_balance(cfg, user, share, -v);
  add_balance(cfg, user, Token::free(share.a), out0);
  add_balance(cfg, user, Token::free(share.b), out1);
  pair.r0 -= out0;
  pair.r1 -= out1;
  pair.supply -= v;
  return {};
}

Res<Rat> amm_exchange_rate(const Config& cfg, const Token& base, const Token& quote) {
  auto ref = find_pair(cfg, base.a, quote.a);
  if (!ref) return err(Errc::UnknownPair, "", 0, base.a + "," + quote.a);
  const PairState& pair = cfg.amm.at(ref->key);
  Rat r_base = ref->reversed ? pair.r1 : pair.r0;
  Rat r_quote = ref->reversed ? pair.r0 : pair.r1;
  if (r_base == 0) return err(Errc::UnfundedPair, "", 0, base.a + "," + quote.a);
  return Rat(r_quote / r_base);
}

Res<Rat> amm_effective_rate(const Config& cfg, const Token& base,
                            const Token& quote, const Rat& v_in) {
  auto ref = find_pair(cfg, base.a, quote.a);
  if (!ref) return err(Errc::UnknownPair, "", 0, base.a + "," + quote.a);
  const PairState& pair = cfg.amm.at(ref->key);
  Rat r_base = ref->reversed ? pair.r1 : pair.r0;
  Rat r_quote = ref->reversed ? pair.r0 : pair.r1;
  if (r_base + v_in == 0) return err(Errc::UnfundedPair, "", 0, base.a);
  return Rat(r_quote / (r_base + v_in));
}

std::set<std::string> arbitrage_tokens(const Config& cfg) {
  std::set<std::string> out;
  for (const auto& [key, pair] : cfg.amm) {
    if (!funded(pair)) continue;
    auto p0 = price_of(cfg, key.first);
    auto p1 = price_of(cfg, key.second);
    if (!p0 || !p1) continue;
    if (pair.r1 * *p1 != pair.r0 * *p0) {
      out.insert(key.first);
      out.insert(key.second);
    }
  }
  return out;
}

namespace {

// Lower bound on sqrt(k) as a rational with denominator `den`.
Rat sqrt_lower_bound(const Rat& k, const Int& den) {
  Int scaled = (rat_num(k) * den * den) / rat_den(k);
  return Rat(int_sqrt(scaled), den);
}

struct ArbCandidate {
  Token t_in;
  Token t_out;
  Rat amount;
  Rat v_out;
  Rat profit;
};

}  // namespace

Res<ArbStep> close_arbitrage(Config& cfg, const LpParams& params,
                             const Account& user, const Int& grid_denominator) {
  if (grid_denominator <= 0) {
    return err(Errc::InvalidScenario, "", 0, "grid denominator");
  }
  std::optional<ArbCandidate> best;
  Rat g = Rat(1) - params.amm_fee;
  for (const auto& [key, pair] : cfg.amm) {
    if (!funded(pair)) continue;
    auto p0 = price_of(cfg, key.first);
    auto p1 = price_of(cfg, key.second);
    if (!p0 || !p1) continue;
    if (pair.r1 * *p1 == pair.r0 * *p0) continue;

    bool sell_first = pair.r1 * *p1 > pair.r0 * *p0;
    Token t_in = Token::free(sell_first ? key.first : key.second);
    Token t_out = Token::free(sell_first ? key.second : key.first);
    Rat r_in = sell_first ? pair.r0 : pair.r1;
    Rat r_out = sell_first ? pair.r1 : pair.r0;
    Rat p_in = sell_first ? *p0 : *p1;
    Rat p_out = sell_first ? *p1 : *p0;

    Rat k = g * r_in * r_out * p_out / p_in;
    Rat x;
    Int den = grid_denominator;
    for (int refine = 0; refine <= 6; ++refine) {
      Rat root = sqrt_lower_bound(k, den * Int(1000000));
      Rat x_opt = (root - r_in) / g;
      x = rat_floor_to(x_opt, den);
      if (x > 0) break;
      den *= 10;
    }
    if (x <= 0) continue;
    Rat bal = balance(cfg, user, t_in);
    if (bal < x) x = rat_floor_to(bal, den);
    if (x <= 0) continue;

    auto quote = amm_swap_quote(cfg, params, t_in, t_out, x);
    if (!quote) continue;
    Rat profit = p_out * *quote - p_in * x;
    if (profit <= 0) continue;
    if (!best || profit > best->profit) {
      best = ArbCandidate{t_in, t_out, x, *quote, profit};
    }
  }
  if (!best) {
    return err(Errc::PreconditionUnmet, "", 0, "no profitable arbitrage at grid");
  }
  if (auto applied = amm_swap(cfg, params, user, best->t_in, best->t_out, best->amount);
      !applied) {
    return applied.error();
  }
  return ArbStep{best->t_in, best->t_out, best->amount, best->profit};
}

}  // namespace defisem
