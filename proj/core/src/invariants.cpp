#include "defisem/invariants.hpp"

#include <set>

namespace defisem {

namespace {

std::map<Token, Rat> wallet_totals(const Config& cfg) {
  std::map<Token, Rat> totals;
  for (const auto& [user, wallet] : cfg.wallets) {
    (void)user;
    for (const auto& [token, amount] : wallet) {
      totals[token] += amount;
    }
  }
  return totals;
}

// Combined holdings of a free token across wallets, pool funds, and AMM
// reserves. Loans are notional records and do not hold tokens.
std::map<std::string, Rat> free_totals(const Config& cfg) {
  std::map<std::string, Rat> totals;
  for (const auto& [token, amount] : wallet_totals(cfg)) {
    if (token.is_free()) totals[token.a] += amount;
  }
  for (const auto& [token, amount] : cfg.pool.funds) {
    totals[token] += amount;
  }
  for (const auto& [key, pair] : cfg.amm) {
    totals[key.first] += pair.r0;
    totals[key.second] += pair.r1;
  }
  return totals;
}

std::set<std::string> claim_tokens(const Config& cfg) {
  std::set<std::string> tokens;
  for (const auto& [token, supply] : cfg.pool.minted) {
    (void)supply;
    tokens.insert(token);
  }
  for (const auto& [user, wallet] : cfg.wallets) {
    (void)user;
    for (const auto& [token, amount] : wallet) {
      (void)amount;
      if (token.is_lp_claim()) tokens.insert(token.a);
    }
  }
  return tokens;
}

}  // namespace

std::vector<std::string> check_state(const Config& cfg) {
  std::vector<std::string> violations;
  auto totals = wallet_totals(cfg);

  for (const auto& [user, wallet] : cfg.wallets) {
    for (const auto& [token, amount] : wallet) {
      if (amount < 0) {
        violations.push_back("negative balance " + user + " " + token.str());
      }
    }
  }
  for (const auto& [token, amount] : cfg.pool.funds) {
    if (amount < 0) violations.push_back("negative funds " + token);
  }
  for (const auto& [user, loans] : cfg.pool.loans) {
    for (const auto& [token, amount] : loans) {
      if (amount < 0) violations.push_back("negative loan " + user + " " + token);
    }
  }
  for (const auto& [key, pair] : cfg.amm) {
    if (pair.r0 < 0 || pair.r1 < 0 || pair.supply < 0) {
      violations.push_back("negative amm state " + key.first + "," + key.second);
    }
  }

  for (const std::string& token : claim_tokens(cfg)) {
    Rat held(0);
    if (auto it = totals.find(Token::lp_claim(token)); it != totals.end()) {
      held = it->second;
    }
    if (held != claim_supply(cfg, token)) {
      violations.push_back("claim supply mismatch m(" + token + "): wallets " +
                           rat_str(held) + " supply " +
                           rat_str(claim_supply(cfg, token)));
    }
  }
  for (const auto& [key, pair] : cfg.amm) {
    Token share = Token::amm_share(key.first, key.second);
    Rat held(0);
    if (auto it = totals.find(share); it != totals.end()) held = it->second;
    if (held != pair.supply) {
      violations.push_back("share supply mismatch " + share.str() + ": wallets " +
                           rat_str(held) + " supply " + rat_str(pair.supply));
    }
  }
  return violations;
}

namespace {

void check_conservation(const Config& pre, const Config& post,
                        std::vector<std::string>& violations) {
  auto before = free_totals(pre);
  auto after = free_totals(post);
  std::set<std::string> names;
  for (const auto& [token, amount] : before) {
    (void)amount;
    names.insert(token);
  }
  for (const auto& [token, amount] : after) {
    (void)amount;
    names.insert(token);
  }
  for (const std::string& token : names) {
    Rat b = before.count(token) ? before.at(token) : Rat(0);
    Rat a = after.count(token) ? after.at(token) : Rat(0);
    if (b != a) {
      violations.push_back("conservation broken for " + token + ": " + rat_str(b) +
                           " -> " + rat_str(a));
    }
  }
}

}  // namespace

std::vector<std::string> check_transition(const Config& pre, const Config& post,
                                          const Tx& tx, const LpParams& params) {
  std::vector<std::string> violations;
  check_conservation(pre, post, violations);

  bool interest = std::holds_alternative<TxInt>(tx);
  std::set<std::string> claims = claim_tokens(pre);
  for (const std::string& token : claim_tokens(post)) claims.insert(token);
  for (const std::string& token : claims) {
    if (claim_supply(pre, token) <= 0 || claim_supply(post, token) <= 0) continue;
    Rat er_pre = exchange_rate(pre, token);
    Rat er_post = exchange_rate(post, token);
    if (interest && total_loans(pre, token) > 0) {
      if (!(er_post > er_pre)) {
        violations.push_back("exchange rate of " + token + " not raised by accrual: " +
                             rat_str(er_pre) + " -> " + rat_str(er_post));
      }
    } else if (er_pre != er_post) {
      violations.push_back("exchange rate of " + token + " moved by " + tx_kind(tx) +
                           ": " + rat_str(er_pre) + " -> " + rat_str(er_post));
    }
  }

  if (const auto* swap = std::get_if<TxAmmSwap>(&tx)) {
    for (const auto& [key, pair_post] : post.amm) {
      auto it = pre.amm.find(key);
      if (it == pre.amm.end()) continue;
      const PairState& pair_pre = it->second;
      bool touched = (key.first == swap->t_in.a && key.second == swap->t_out.a) ||
                     (key.first == swap->t_out.a && key.second == swap->t_in.a);
      if (!touched) {
        if (pair_pre != pair_post) {
          violations.push_back("swap touched unrelated pair " + key.first + "," +
                               key.second);
        }
        continue;
      }
      Rat prod_pre = pair_pre.r0 * pair_pre.r1;
      Rat prod_post = pair_post.r0 * pair_post.r1;
      if (params.amm_fee == 0) {
        if (prod_pre != prod_post) {
          violations.push_back("swap moved reserve product: " + rat_str(prod_pre) +
                               " -> " + rat_str(prod_post));
        }
      } else if (!(prod_post > prod_pre)) {
        violations.push_back("fee swap did not grow reserve product");
      }
      bool in_is_first = key.first == swap->t_in.a;
      Rat rate_pre = in_is_first ? pair_pre.r1 / pair_pre.r0 : pair_pre.r0 / pair_pre.r1;
      Rat rate_post =
          in_is_first ? pair_post.r1 / pair_post.r0 : pair_post.r0 / pair_post.r1;
      if (!(rate_post < rate_pre)) {
        violations.push_back("swap did not lower the input leg's rate: " +
                             rat_str(rate_pre) + " -> " + rat_str(rate_post));
      }
    }
  }

  if (std::holds_alternative<TxAmmDep>(tx) || std::holds_alternative<TxAmmRdm>(tx)) {
    for (const auto& [key, pair_post] : post.amm) {
      auto it = pre.amm.find(key);
      if (it == pre.amm.end()) continue;
      const PairState& pair_pre = it->second;
      if (pair_pre.r0 <= 0 || pair_post.r0 <= 0) continue;
      if (pair_pre.r1 * pair_post.r0 != pair_post.r1 * pair_pre.r0) {
        violations.push_back("liquidity change moved spot rate of " + key.first + "," +
                             key.second);
      }
    }
  }

  return violations;
}

std::vector<std::string> check_group_transition(const Config& pre, const Config& post) {
  std::vector<std::string> violations;
  check_conservation(pre, post, violations);
  std::set<std::string> claims = claim_tokens(pre);
  for (const std::string& token : claim_tokens(post)) claims.insert(token);
  for (const std::string& token : claims) {
    if (claim_supply(pre, token) <= 0 || claim_supply(post, token) <= 0) continue;
    if (exchange_rate(pre, token) != exchange_rate(post, token)) {
      violations.push_back("exchange rate of " + token + " moved by a group");
    }
  }
  return violations;
}

}  // namespace defisem
