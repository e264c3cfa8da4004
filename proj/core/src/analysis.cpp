#include "defisem/analysis.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace defisem {

Res<Rat> net_worth(const Config& cfg, const Account& user) {
  std::set<std::string> tokens;
  if (auto it = cfg.wallets.find(user); it != cfg.wallets.end()) {
    for (const auto& [token, amount] : it->second) {
      (void)amount;
      if (token.is_free()) tokens.insert(token.a);
      if (token.is_lp_claim()) tokens.insert(token.a);
    }
  }
  if (auto it = cfg.pool.loans.find(user); it != cfg.pool.loans.end()) {
    for (const auto& [token, amount] : it->second) {
      (void)amount;
      tokens.insert(token);
    }
  }
  Rat total(0);
  for (const std::string& t : tokens) {
    auto p = valuation_price(cfg, t);
    if (!p) return err(Errc::MissingPrice, "", 0, t);
    Rat held = balance(cfg, user, Token::free(t));
    Rat claims = balance(cfg, user, Token::lp_claim(t));
    Rat position = held + claims * exchange_rate(cfg, t) - loan_of(cfg, user, t);
    total += position * *p;
  }
  return total;
}

Res<Rat> nr_loan_value(const Config& cfg, const LpParams& params, const Account& user) {
  auto coll = collateralization(cfg, user);
  if (!coll) return coll.error();
  if (*coll >= ExtRat::of(params.r_liq)) return Rat(0);
  auto loans = loan_value(cfg, user);
  if (!loans) return loans.error();
  auto collateral = collateral_value(cfg, user);
  if (!collateral) return collateral.error();
  return Rat(*loans - *collateral / params.r_liq);
}

Res<SafetyReport> safety_report(const Config& cfg, const LpParams& params) {
  SafetyReport report;
  Rat total_loans(0);
  Rat unsafe_loans(0);
  Rat non_recoverable(0);
  std::set<Account> users;
  for (const auto& [user, wallet] : cfg.wallets) {
    (void)wallet;
    users.insert(user);
  }
  for (const auto& [user, loans] : cfg.pool.loans) {
    (void)loans;
    users.insert(user);
  }
  for (const Account& user : users) {
    UserSafety entry;
    auto coll = collateralization(cfg, user);
    if (!coll) return coll.error();
    entry.coll = *coll;
    auto coll_val = collateral_value(cfg, user);
    if (!coll_val) return coll_val.error();
    entry.coll_val = *coll_val;
    auto loan_val = loan_value(cfg, user);
    if (!loan_val) return loan_val.error();
    entry.loan_val = *loan_val;
    auto nr = nr_loan_value(cfg, params, user);
    if (!nr) return nr.error();
    entry.nr_loan_val = *nr;

    total_loans += entry.loan_val;
    if (entry.coll < ExtRat::of(params.c_min)) unsafe_loans += entry.loan_val;
    non_recoverable += entry.nr_loan_val;
    report.per_user.emplace(user, std::move(entry));
  }
  if (total_loans == 0) {
    report.epsilon_ratio = Rat(0);
    report.strong_epsilon_ratio = Rat(0);
  } else {
    report.epsilon_ratio = unsafe_loans / total_loans;
    report.strong_epsilon_ratio = non_recoverable / total_loans;
  }
  return report;
}

namespace {

struct Cell {
  SeizeKey key;
  Rat unit_value;
  Rat balance_cap;
  Rat p_under;
  Rat er;
};

struct Instance {
  std::vector<Cell> cells;
  std::map<Account, Rat> coll_cap;
  std::map<std::pair<Account, std::string>, Rat> loan_cap;
  std::map<std::string, Rat> fund_cap;
};

Res<Instance> build_instance(const Config& cfg, const LpParams& params,
                             bool literal_objective) {
  Instance inst;
  for (const auto& [user, loans] : cfg.pool.loans) {
    auto coll = collateralization(cfg, user);
    if (!coll) return coll.error();
    if (!(*coll < ExtRat::of(params.c_min))) continue;
    auto coll_val = collateral_value(cfg, user);
    if (!coll_val) return coll_val.error();

    std::vector<std::pair<std::string, Rat>> claims;
    if (auto wit = cfg.wallets.find(user); wit != cfg.wallets.end()) {
      for (const auto& [token, amount] : wit->second) {
        if (token.is_lp_claim() && amount > 0) claims.emplace_back(token.a, amount);
      }
    }
    if (claims.empty()) continue;
    inst.coll_cap[user] = *coll_val;

    for (const auto& [repaid, owed] : loans) {
      if (owed <= 0) continue;
      auto p_repaid = valuation_price(cfg, repaid);
      if (!p_repaid) return err(Errc::MissingPrice, "", 0, repaid);
      inst.loan_cap[{user, repaid}] = owed * *p_repaid * params.r_liq;
      for (const auto& [under, held] : claims) {
        auto p_under = valuation_price(cfg, under);
        if (!p_under) return err(Errc::MissingPrice, "", 0, under);
        Rat er = exchange_rate(cfg, under);
        Rat unit = literal_objective ? Rat(1) / *p_under
                                     : *p_under * (er - Rat(1) / params.r_liq);
        if (unit <= 0) continue;
        inst.cells.push_back(Cell{{user, repaid, under}, unit, held, *p_under, er});
        if (!inst.fund_cap.count(under)) {
          inst.fund_cap[under] = pool_funds(cfg, under);
        }
      }
    }
  }
  return inst;
}

struct CapLedger {
  std::map<Account, Rat> coll;
  std::map<std::pair<Account, std::string>, Rat> loan;
  std::map<std::string, Rat> fund;

  explicit CapLedger(const Instance& inst)
      : coll(inst.coll_cap), loan(inst.loan_cap), fund(inst.fund_cap) {}

  Rat headroom(const Cell& cell) const {
    Rat room = cell.balance_cap;
    Rat loan_rem = loan.at({cell.key.victim, cell.key.repaid});
    room = std::min(room, Rat(loan_rem / cell.p_under));
    if (cell.er > 0) {
      room = std::min(room, Rat(fund.at(cell.key.seized) / cell.er));
      Rat weight = cell.er * cell.p_under;
      room = std::min(room, Rat(coll.at(cell.key.victim) / weight));
    }
    return room < 0 ? Rat(0) : room;
  }

  void consume(const Cell& cell, const Rat& amount) {
    loan.at({cell.key.victim, cell.key.repaid}) -= amount * cell.p_under;
    fund.at(cell.key.seized) -= amount * cell.er;
    coll.at(cell.key.victim) -= amount * cell.er * cell.p_under;
  }
};

Rat floor_to_grid(const Rat& x, const Rat& g) {
  Rat q = x / g;
  Int whole = rat_num(q) / rat_den(q);
  if (whole < 0) return Rat(0);
  return Rat(whole) * g;
}

using Alloc = std::map<std::size_t, Rat>;

Rat alloc_objective(const Instance& inst, const Alloc& alloc) {
  Rat total(0);
  for (const auto& [i, amount] : alloc) total += inst.cells[i].unit_value * amount;
  return total;
}

CapLedger ledger_after(const Instance& inst, const Alloc& alloc) {
  CapLedger caps(inst);
  for (const auto& [i, amount] : alloc) caps.consume(inst.cells[i], amount);
  return caps;
}

Rat cell_allocated(const Alloc& alloc, std::size_t i) {
  auto it = alloc.find(i);
  return it == alloc.end() ? Rat(0) : it->second;
}

// Tops up every cell, in the order given, with the largest grid-aligned
// amount the caps allow.
void greedy_fill(const Instance& inst, const std::vector<std::size_t>& order,
                 const Rat& g, Alloc& alloc) {
  CapLedger caps = ledger_after(inst, alloc);
  for (std::size_t i : order) {
    const Cell& cell = inst.cells[i];
    Rat used = cell_allocated(alloc, i);
    Rat room = caps.headroom(cell);
    Rat balance_room = cell.balance_cap - used;
    if (balance_room < room) room = balance_room;
    Rat add = floor_to_grid(room, g);
    if (add <= 0) continue;
    alloc[i] = used + add;
    caps.consume(cell, add);
  }
}

std::vector<std::vector<std::size_t>> candidate_orders(const Instance& inst) {
  std::vector<std::size_t> base(inst.cells.size());
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = i;
  auto sorted_by = [&](auto key) {
    auto order = base;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      Rat ka = key(inst.cells[a]);
      Rat kb = key(inst.cells[b]);
      if (ka != kb) return ka > kb;
      return inst.cells[a].key < inst.cells[b].key;
    });
    return order;
  };
  std::vector<std::vector<std::size_t>> orders;
  orders.push_back(sorted_by([](const Cell& c) { return c.unit_value; }));
  orders.push_back(sorted_by([](const Cell& c) { return c.unit_value / c.p_under; }));
  orders.push_back(sorted_by([](const Cell& c) {
    Rat w = c.er * c.p_under;
    return w > 0 ? Rat(c.unit_value / w) : c.unit_value;
  }));
  return orders;
}

LiquidationPlan plan_from_alloc(const Instance& inst, const Alloc& alloc) {
  LiquidationPlan plan;
  plan.objective = alloc_objective(inst, alloc);
  for (const auto& [i, amount] : alloc) {
    if (amount > 0) plan.seized[inst.cells[i].key] = amount;
  }
  return plan;
}

}  // namespace

Res<void> plan_feasible(const Config& cfg, const LpParams& params,
                        const LiquidationPlan& plan) {
  std::map<Account, Rat> seized_value;
  std::map<std::pair<Account, std::string>, Rat> repaid_value;
  std::map<std::string, Rat> fund_use;

  for (const auto& [key, amount] : plan.seized) {
    if (amount < 0) return err(Errc::NegativeAmount, "plan", 0, key.victim);
    if (amount == 0) continue;
    auto coll = collateralization(cfg, key.victim);
    if (!coll) return coll.error();
    if (!(*coll < ExtRat::of(params.c_min))) {
      return err(Errc::NotLiquidatable, "plan", 1, key.victim);
    }
    if (balance(cfg, key.victim, Token::lp_claim(key.seized)) < amount) {
      return err(Errc::InsufficientBalance, "plan", 4,
                 key.victim + " m(" + key.seized + ")");
    }
    auto p_under = valuation_price(cfg, key.seized);
    if (!p_under) return err(Errc::MissingPrice, "plan", 0, key.seized);
    Rat er = exchange_rate(cfg, key.seized);
    seized_value[key.victim] += amount * er * *p_under;
    repaid_value[{key.victim, key.repaid}] += amount * *p_under;
    fund_use[key.seized] += amount * er;
  }

  for (const auto& [victim, value] : seized_value) {
    auto coll_val = collateral_value(cfg, victim);
    if (!coll_val) return coll_val.error();
    if (value > *coll_val) {
      return err(Errc::Undercollateralized, "plan", 2, victim);
    }
  }
  for (const auto& [key, value] : repaid_value) {
    auto p_repaid = valuation_price(cfg, key.second);
    if (!p_repaid) return err(Errc::MissingPrice, "plan", 0, key.second);
    if (value > loan_of(cfg, key.first, key.second) * *p_repaid * params.r_liq) {
      return err(Errc::InsufficientLoan, "plan", 3, key.first + " " + key.second);
    }
  }
  for (const auto& [under, use] : fund_use) {
    if (use > pool_funds(cfg, under)) {
      return err(Errc::InsufficientPoolFunds, "plan", 5, under);
    }
  }
  return {};
}

Res<Rat> plan_objective(const Config& cfg, const LpParams& params,
                        const LiquidationPlan& plan, bool literal_objective) {
  Rat total(0);
  for (const auto& [key, amount] : plan.seized) {
    auto p_under = valuation_price(cfg, key.seized);
    if (!p_under) return err(Errc::MissingPrice, "plan", 0, key.seized);
    if (literal_objective) {
      total += amount / *p_under;
    } else {
      Rat er = exchange_rate(cfg, key.seized);
      total += amount * *p_under * (er - Rat(1) / params.r_liq);
    }
  }
  return total;
}

Res<LiquidationPlan> optimal_liquidation(const Config& cfg, const LpParams& params,
                                         const Rat& granularity,
                                         bool literal_objective) {
  if (granularity <= 0) return err(Errc::NonPositiveAmount, "plan", 0, "granularity");
  auto inst = build_instance(cfg, params, literal_objective);
  if (!inst) return inst.error();

  Alloc best;
  Rat best_value(0);
  auto consider = [&](const Alloc& alloc) {
    Rat value = alloc_objective(*inst, alloc);
    if (value > best_value) {
      best = alloc;
      best_value = value;
    }
  };

  auto orders = candidate_orders(*inst);
  for (const auto& order : orders) {
    Alloc alloc;
    greedy_fill(*inst, order, granularity, alloc);
    consider(alloc);
  }

  // Ruin-and-recreate: drain one cell partially or fully, refill the rest.
  bool improved = true;
  int rounds = 0;
  while (improved && rounds < 50) {
    improved = false;
    ++rounds;
    Alloc base = best;
    for (const auto& [i, amount] : base) {
      for (int mode = 0; mode < 3; ++mode) {
        Rat keep = mode == 0   ? Rat(0)
                   : mode == 1 ? floor_to_grid(amount / 2, granularity)
                               : amount - granularity;
        if (keep < 0) keep = 0;
        if (keep >= amount) continue;
        Alloc trial = base;
        if (keep == 0) {
          trial.erase(i);
        } else {
          trial[i] = keep;
        }
        for (const auto& order : orders) {
          Alloc refill = trial;
          greedy_fill(*inst, order, granularity, refill);
          Rat value = alloc_objective(*inst, refill);
          if (value > best_value) {
            best = refill;
            best_value = value;
            improved = true;
          }
        }
      }
    }
  }
  return plan_from_alloc(*inst, best);
}

Res<LiquidationPlan> optimal_liquidation_oracle(const Config& cfg,
                                                const LpParams& params,
                                                const Rat& granularity,
                                                bool literal_objective) {
  if (granularity <= 0) return err(Errc::NonPositiveAmount, "plan", 0, "granularity");
  auto inst = build_instance(cfg, params, literal_objective);
  if (!inst) return inst.error();

  std::set<Account> victims;
  std::set<std::pair<std::string, std::string>> shapes;
  for (const Cell& cell : inst->cells) {
    victims.insert(cell.key.victim);
    shapes.insert({cell.key.repaid, cell.key.seized});
  }
  if (victims.size() > 3 || shapes.size() > 2) {
    return err(Errc::InstanceTooLarge, "plan", 0,
               std::to_string(victims.size()) + " victims, " +
                   std::to_string(shapes.size()) + " cell shapes");
  }
  CapLedger fresh(*inst);
  for (const Cell& cell : inst->cells) {
    Rat standalone = std::min(cell.balance_cap, fresh.headroom(cell));
    Rat points = floor_to_grid(standalone, granularity) / granularity;
    if (points > 20) {
      return err(Errc::InstanceTooLarge, "plan", 0,
                 "cell grid has " + rat_str(points) + " points");
    }
  }

  std::vector<std::size_t> order(inst->cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (inst->cells[a].unit_value != inst->cells[b].unit_value) {
      return inst->cells[a].unit_value > inst->cells[b].unit_value;
    }
    return inst->cells[a].key < inst->cells[b].key;
  });

  Alloc best;
  Rat best_value(0);
  Alloc current;

  // Depth-first over grid allocations with an optimistic bound: every
  // remaining cell filled to its standalone headroom.
  auto dfs = [&](auto&& self, std::size_t depth, CapLedger& caps, Rat value) -> void {
    if (value > best_value) {
      best_value = value;
      best = current;
    }
    if (depth == order.size()) return;

    Rat bound = value;
    for (std::size_t d = depth; d < order.size(); ++d) {
      const Cell& cell = inst->cells[order[d]];
      Rat used = cell_allocated(current, order[d]);
      Rat room = std::min(Rat(cell.balance_cap - used), caps.headroom(cell));
      if (room > 0) bound += cell.unit_value * floor_to_grid(room, granularity);
    }
    if (bound <= best_value) return;

    const Cell& cell = inst->cells[order[depth]];
    Rat room = std::min(cell.balance_cap, caps.headroom(cell));
    Rat max_take = floor_to_grid(room, granularity);
    for (Rat take = max_take; take >= 0; take -= granularity) {
      CapLedger next = caps;
      if (take > 0) {
        next.consume(cell, take);
        current[order[depth]] = take;
      } else {
        current.erase(order[depth]);
      }
      self(self, depth + 1, next, value + cell.unit_value * take);
      if (take == 0) break;
    }
    current.erase(order[depth]);
  };

  CapLedger caps(*inst);
  dfs(dfs, 0, caps, Rat(0));
  return plan_from_alloc(*inst, best);
}

}  // namespace defisem
