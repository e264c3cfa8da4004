#include "defisem/fuzz.hpp"

#include <algorithm>
#include <random>

#include "defisem/amm.hpp"
#include "defisem/invariants.hpp"
#include "defisem/lending.hpp"
#include "defisem/scenario.hpp"

namespace defisem {

namespace {

std::map<std::string, int> default_weights(bool amm) {
  std::map<std::string, int> w{
      {"Trf", 4}, {"Px", 2},  {"Dep", 10}, {"Bor", 8}, {"Int", 6},
      {"Rep", 6}, {"Rdm", 6}, {"Liq", 4},  {"Mtrf", 3},
  };
  if (amm) {
    w["AmmDep"] = 8;
    w["AmmSwap"] = 10;
    w["AmmRdm"] = 4;
  }
  return w;
}

struct Draw {
  std::mt19937_64 gen;

  explicit Draw(std::uint64_t seed) : gen(seed) {}

  long pick(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(gen);
  }
  Rat fraction16() { return Rat(pick(1, 16), 16); }
  bool chance(int percent) { return pick(1, 100) <= percent; }

  template <typename T>
  const T& choice(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(pick(0, static_cast<long>(items.size()) - 1))];
  }
};

std::string token_name(int i) { return "tau" + std::to_string(i); }
std::string user_name(int i) { return std::string("U") + std::to_string(i); }

struct Fuzzer {
  Draw draw;
  FuzzProfile profile;
  LpParams params;
  InterestRates rates;
  std::vector<Account> users;
  std::vector<std::string> tokens;
  Config cfg;

  Fuzzer(std::uint64_t seed, const FuzzProfile& prof) : draw(seed), profile(prof) {
    for (int i = 0; i < profile.users; ++i) users.push_back(user_name(i));
    for (int i = 0; i < profile.tokens; ++i) tokens.push_back(token_name(i));
    params = profile.params;
    rates = profile.rates;
    if (profile.randomize_params) {
      params.r_liq = Rat(100 + 15 + draw.pick(0, 25), 100);
      params.c_min = params.r_liq * Rat(100 + draw.pick(1, 100), 100);
      if (profile.amm) {
        params.amm_fee = draw.chance(50) ? Rat(0) : Rat(draw.pick(1, 30), 1000);
      }
      rates.kind = InterestRates::Kind::Constant;
      rates.constant.clear();
      for (const std::string& t : tokens) {
        rates.constant[t] = Rat(draw.pick(1, 100), 1000);
      }
    }
    for (const std::string& t : tokens) {
      cfg.prices[t] = Rat(draw.pick(1, 20), draw.pick(1, 4));
    }
    for (const Account& u : users) {
      for (const std::string& t : tokens) {
        if (draw.chance(30)) continue;
        cfg.wallets[u][Token::free(t)] = Rat(draw.pick(1, 200));
      }
    }
    snapshot_refresh(cfg);
  }

  std::vector<Account> holders_of(const Token& token) {
    std::vector<Account> out;
    for (const Account& u : users) {
      if (balance(cfg, u, token) > 0) out.push_back(u);
    }
    return out;
  }

  std::optional<Tx> gen_trf() {
    const std::string& t = draw.choice(tokens);
    auto holders = holders_of(Token::free(t));
    if (holders.empty()) return std::nullopt;
    Account from = draw.choice(holders);
    Account to = draw.choice(users);
    if (from == to) return std::nullopt;
    return TxTrf{from, to, balance(cfg, from, Token::free(t)) * draw.fraction16(),
                 Token::free(t)};
  }

  std::optional<Tx> gen_px() {
    const std::string& t = draw.choice(tokens);
    return TxPx{{{t, Rat(draw.pick(1, 20), draw.pick(1, 4))}}};
  }

  std::optional<Tx> gen_dep() {
    const std::string& t = draw.choice(tokens);
    auto holders = holders_of(Token::free(t));
    if (holders.empty()) return std::nullopt;
    Account user = draw.choice(holders);
    return TxDep{user, balance(cfg, user, Token::free(t)) * draw.fraction16(),
                 Token::free(t)};
  }

  std::optional<Tx> gen_bor() {
    const std::string& t = draw.choice(tokens);
    Rat funds = pool_funds(cfg, t);
    if (funds <= 0) return std::nullopt;
    const Account& user = draw.choice(users);
    auto coll_val = collateral_value(cfg, user);
    auto loans = loan_value(cfg, user);
    if (!coll_val || !loans) return std::nullopt;
    auto price = price_of(cfg, t);
    if (!price) return std::nullopt;
    Rat value_room = *coll_val / params.c_min - *loans;
    if (value_room <= 0) return std::nullopt;
    Rat cap = std::min(funds, Rat(value_room / *price));
    Rat v = cap * draw.fraction16();
    if (v <= 0) return std::nullopt;
    return TxBor{user, v, Token::free(t)};
  }

  std::optional<Tx> gen_rep() {
    for (const auto& [user, loans] : cfg.pool.loans) {
      for (const auto& [t, owed] : loans) {
        if (owed <= 0) continue;
        Rat held = balance(cfg, user, Token::free(t));
        if (held <= 0) continue;
        Rat v = std::min(owed, held) * draw.fraction16();
        if (v <= 0) continue;
        return TxRep{user, v, Token::free(t)};
      }
    }
    return std::nullopt;
  }

  std::optional<Tx> gen_rdm() {
    const std::string& t = draw.choice(tokens);
    auto holders = holders_of(Token::lp_claim(t));
    if (holders.empty()) return std::nullopt;
    Account user = draw.choice(holders);
    Rat er = exchange_rate(cfg, t);
    Rat cap = std::min(balance(cfg, user, Token::lp_claim(t)),
                       Rat(pool_funds(cfg, t) / er));
    Rat v = cap * draw.fraction16();
    if (v <= 0) return std::nullopt;
    return TxRdm{user, v, Token::lp_claim(t)};
  }

  std::optional<Tx> gen_liq() {
    for (const auto& [victim, loans] : cfg.pool.loans) {
      auto coll = collateralization(cfg, victim);
      if (!coll || !(*coll < ExtRat::of(params.c_min))) continue;
      for (const auto& [t, owed] : loans) {
        if (owed <= 0) continue;
        for (const Account& liquidator : users) {
          if (liquidator == victim) continue;
          Rat held = balance(cfg, liquidator, Token::free(t));
          if (held <= 0) continue;
          for (const std::string& u : tokens) {
            Rat claims = balance(cfg, victim, Token::lp_claim(u));
            if (claims <= 0) continue;
            Rat v = std::min(owed, held) * draw.fraction16();
            auto seize = liquidation_seizure(cfg, params, v, Token::free(t),
                                             Token::lp_claim(u));
            if (!seize || *seize > claims) continue;
            return TxLiq{liquidator, victim, v, Token::free(t), Token::lp_claim(u),
                         std::nullopt};
          }
        }
      }
    }
    return std::nullopt;
  }

  std::optional<Tx> gen_mtrf() {
    const std::string& t = draw.choice(tokens);
    auto holders = holders_of(Token::lp_claim(t));
    if (holders.empty()) return std::nullopt;
    Account from = draw.choice(holders);
    Account to = draw.choice(users);
    if (from == to) return std::nullopt;
    return TxMtrf{from, to,
                  balance(cfg, from, Token::lp_claim(t)) * draw.fraction16(),
                  Token::lp_claim(t)};
  }

  std::optional<Tx> gen_amm_dep() {
    if (tokens.size() < 2) return std::nullopt;
    int i = static_cast<int>(draw.pick(0, static_cast<long>(tokens.size()) - 2));
    int j = static_cast<int>(draw.pick(i + 1, static_cast<long>(tokens.size()) - 1));
    Token t0 = Token::free(tokens[static_cast<std::size_t>(i)]);
    Token t1 = Token::free(tokens[static_cast<std::size_t>(j)]);
    const Account& user = draw.choice(users);
    Rat b0 = balance(cfg, user, t0);
    Rat b1 = balance(cfg, user, t1);
    if (b0 <= 0 || b1 <= 0) return std::nullopt;
    auto it = cfg.amm.find({t0.a, t1.a});
    if (it != cfg.amm.end() && it->second.r0 > 0) {
      Rat v0 = b0 * draw.fraction16();
      Rat v1 = v0 * it->second.r1 / it->second.r0;
      if (v1 <= 0 || v1 > b1) return std::nullopt;
      return TxAmmDep{user, t0, t1, v0, v1};
    }
    return TxAmmDep{user, t0, t1, b0 * draw.fraction16(), b1 * draw.fraction16()};
  }

  std::optional<Tx> gen_amm_swap() {
    std::vector<PairKey> funded;
    for (const auto& [key, pair] : cfg.amm) {
      if (pair.r0 > 0 && pair.r1 > 0) funded.push_back(key);
    }
    if (funded.empty()) return std::nullopt;
    PairKey key = draw.choice(funded);
    bool forward = draw.chance(50);
    Token t_in = Token::free(forward ? key.first : key.second);
    Token t_out = Token::free(forward ? key.second : key.first);
    auto holders = holders_of(t_in);
    if (holders.empty()) return std::nullopt;
    Account user = draw.choice(holders);
    Rat v = balance(cfg, user, t_in) * draw.fraction16();
    if (v <= 0) return std::nullopt;
    return TxAmmSwap{user, t_in, t_out, v};
  }

  std::optional<Tx> gen_amm_rdm() {
    for (const auto& [key, pair] : cfg.amm) {
      (void)pair;
      Token share = Token::amm_share(key.first, key.second);
      auto holders = holders_of(share);
      if (holders.empty()) continue;
      Account user = draw.choice(holders);
      Rat v = balance(cfg, user, share) * draw.fraction16();
      if (v <= 0) continue;
      return TxAmmRdm{user, share, v};
    }
    return std::nullopt;
  }

  std::optional<Tx> gen_kind(const std::string& kind) {
    if (kind == "Trf") return gen_trf();
    if (kind == "Px") return gen_px();
    if (kind == "Dep") return gen_dep();
    if (kind == "Bor") return gen_bor();
    if (kind == "Int") return Tx{TxInt{}};
    if (kind == "Rep") return gen_rep();
    if (kind == "Rdm") return gen_rdm();
    if (kind == "Liq") return gen_liq();
    if (kind == "Mtrf") return gen_mtrf();
    if (kind == "AmmDep") return gen_amm_dep();
    if (kind == "AmmSwap") return gen_amm_swap();
    if (kind == "AmmRdm") return gen_amm_rdm();
    return std::nullopt;
  }

  std::string pick_kind() {
    long total = 0;
    for (const auto& [kind, weight] : profile.weights) total += weight;
    long roll = draw.pick(1, total);
    for (const auto& [kind, weight] : profile.weights) {
      roll -= weight;
      if (roll <= 0) return kind;
    }
    return profile.weights.begin()->first;
  }
};

std::string category_of(const std::string& violation) {
  auto colon = violation.find(':');
  return colon == std::string::npos ? violation : violation.substr(0, colon);
}

struct RunOutcome {
  std::vector<Tx> applied;
  std::vector<std::string> violations;
  std::string category;
};

// Applies the fixed transaction list in order, skipping entries the rules
// reject, and stops at the first invariant violation.
RunOutcome run_trace(const Config& genesis, const LpParams& params,
                     const InterestRates& rates, const std::vector<Tx>& txs) {
  RunOutcome outcome;
  Config cfg = genesis;
  for (const Tx& tx : txs) {
    Config pre = cfg;
    if (!apply_tx(cfg, params, rates, tx)) {
      cfg = std::move(pre);
      continue;
    }
    outcome.applied.push_back(tx);
    auto violations = check_state(cfg);
    for (const std::string& v : check_transition(pre, cfg, tx, params)) {
      violations.push_back(v);
    }
    if (!violations.empty()) {
      outcome.violations = std::move(violations);
      outcome.category = category_of(outcome.violations.front());
      return outcome;
    }
  }
  return outcome;
}

Scenario reproducer_scenario(const FuzzResult& result) {
  Scenario sc;
  sc.name = "fuzz-seed-" + std::to_string(result.seed);
  sc.params = result.params;
  sc.rates = result.rates;
  sc.initial = result.initial;
  for (const Tx& tx : result.trace) {
    ScenarioStep step;
    step.txs.push_back(tx);
    sc.steps.push_back(std::move(step));
  }
  return sc;
}

}  // namespace

FuzzProfile lp_only_profile() {
  FuzzProfile profile;
  profile.weights = default_weights(false);
  return profile;
}

FuzzProfile lp_amm_profile() {
  FuzzProfile profile;
  profile.amm = true;
  profile.tokens = 3;
  profile.weights = default_weights(true);
  return profile;
}

std::vector<Tx> shrink_trace(std::vector<Tx> trace, const std::string& category,
                             const TraceChecker& fails_with) {
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      std::vector<Tx> candidate;
      candidate.reserve(trace.size() - 1);
      for (std::size_t k = 0; k < trace.size(); ++k) {
        if (k != i) candidate.push_back(trace[k]);
      }
      auto failure = fails_with(candidate);
      if (failure && *failure == category) {
        trace = std::move(candidate);
        shrunk = true;
        break;
      }
    }
  }
  return trace;
}

FuzzResult fuzz_run(std::uint64_t seed, int steps, const FuzzProfile& profile) {
  Fuzzer fuzzer(seed, profile);
  FuzzResult result;
  result.seed = seed;
  result.initial = fuzzer.cfg;
  result.params = fuzzer.params;
  result.rates = fuzzer.rates;
  if (profile.capture_states) result.states.push_back(fuzzer.cfg);

  for (int step = 0; step < steps; ++step) {
    bool applied = false;
    for (int attempt = 0; attempt < 30 && !applied; ++attempt) {
      auto tx = fuzzer.gen_kind(fuzzer.pick_kind());
      if (!tx) continue;
      Config pre = fuzzer.cfg;
      if (!apply_tx(fuzzer.cfg, fuzzer.params, fuzzer.rates, *tx)) {
        fuzzer.cfg = std::move(pre);
        continue;
      }
      applied = true;
      result.trace.push_back(*tx);
      ++result.steps_applied;
      if (profile.capture_states) result.states.push_back(fuzzer.cfg);

      auto violations = check_state(fuzzer.cfg);
      for (const std::string& v :
           check_transition(pre, fuzzer.cfg, *tx, fuzzer.params)) {
        violations.push_back(v);
      }
      if (!violations.empty()) {
        result.ok = false;
        result.violations = std::move(violations);
        result.violation_category = category_of(result.violations.front());
      }
    }
    if (!result.ok) break;
  }
  result.final_cfg = fuzzer.cfg;

  if (!result.ok) {
    auto checker = [&](const std::vector<Tx>& txs) -> std::optional<std::string> {
      auto outcome = run_trace(result.initial, result.params, result.rates, txs);
      if (outcome.violations.empty()) return std::nullopt;
      return outcome.category;
    };
    result.trace = shrink_trace(result.trace, result.violation_category, checker);
    result.reproducer = scenario_to_json(reproducer_scenario(result));
  }
  return result;
}

}  // namespace defisem
