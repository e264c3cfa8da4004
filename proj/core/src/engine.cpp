#include "defisem/engine.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace defisem {

bool pred_equal(const Pred& a, const Pred& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Pred::Kind::True:
    case Pred::Kind::False:
      return true;
    case Pred::Kind::Cmp: {
      auto expr_eq = [](const Expr& x, const Expr& y) {
        return x.kind == y.kind && x.value == y.value && x.a == y.a && x.b == y.b;
      };
      return a.op == b.op && expr_eq(a.lhs, b.lhs) && expr_eq(a.rhs, b.rhs);
    }
    case Pred::Kind::And:
    case Pred::Kind::Or:
      return pred_equal(*a.left, *b.left) && pred_equal(*a.right, *b.right);
    case Pred::Kind::Not:
      return pred_equal(*a.left, *b.left);
  }
  return false;
}

Res<void> announce(NetworkState& ns, Auth auth) {
  if (is_unsigned(auth.tx)) {
    return err(Errc::InvalidAuthorization, "announce", 0, tx_kind(auth.tx));
  }
  if (std::find(ns.auths.begin(), ns.auths.end(), auth) == ns.auths.end()) {
    ns.auths.push_back(std::move(auth));
  }
  return {};
}

Res<void> announce_group(NetworkState& ns, GroupAuth auth) {
  if (auth.txs.empty()) return err(Errc::EmptyGroup, "announce", 0);
  for (const Tx& tx : auth.txs) {
    if (is_unsigned(tx)) {
      return err(Errc::InvalidAuthorization, "announce", 0, tx_kind(tx));
    }
  }
  if (std::find(ns.group_auths.begin(), ns.group_auths.end(), auth) ==
      ns.group_auths.end()) {
    ns.group_auths.push_back(std::move(auth));
  }
  return {};
}

namespace {

// Picks the first live matching authorization whose predicate holds.
// Distinguishes "nothing announced" from "announced but predicate false".
template <typename Record, typename Key>
Res<Record*> find_live_auth(const Config& cfg, std::vector<Record>& records,
                            const Key& key, const std::string& rule,
                            const std::string& what) {
  bool live_matched = false;
  for (Record& a : records) {
    if (key(a)) {
      if (a.used && !a.multi_use) continue;
      live_matched = true;
      auto holds = eval_pred(cfg, a.pred);
      if (!holds) return holds.error();
      if (*holds) return &a;
    }
  }
  if (live_matched) return err(Errc::PredicateFalse, rule, 0, what);
  return err(Errc::NotAuthorized, rule, 0, what);
}

}  // namespace

Res<void> execute_tx(NetworkState& ns, const Tx& tx) {
  if (is_flash(tx)) {
    return err(Errc::FlashOutsideGroup, tx_kind(tx), 0, tx_str(tx));
  }
  if (is_unsigned(tx)) {
    if (auto r = apply_tx(ns.cfg, ns.params, ns.rates, tx); !r) return r.error();
    snapshot_refresh(ns.cfg);
    return {};
  }
  auto auth = find_live_auth(
      ns.cfg, ns.auths, [&](const Auth& a) { return a.tx == tx; }, tx_kind(tx),
      tx_str(tx));
  if (!auth) return auth.error();
  if (auto r = apply_tx(ns.cfg, ns.params, ns.rates, tx); !r) return r.error();
  (*auth)->used = true;
  snapshot_refresh(ns.cfg);
  return {};
}

Res<void> validate_flash_obligations(const Config& cfg, const LpParams& params,
                                     const std::vector<Tx>& txs) {
  std::map<std::string, std::deque<Rat>> open_borrows;
  std::map<std::string, std::deque<Rat>> open_mints;
  for (const Tx& tx : txs) {
    if (const auto* fb = std::get_if<TxFBorrow>(&tx)) {
      open_borrows[fb->token.a].push_back(fb->v);
    } else if (const auto* fr = std::get_if<TxFRepay>(&tx)) {
      auto& queue = open_borrows[fr->token.a];
      if (queue.empty()) {
        return err(Errc::UnmatchedFlashRepay, "fRepay", 0, tx_str(tx));
      }
      Rat borrowed = queue.front();
      queue.pop_front();
      auto p = valuation_price(cfg, fr->token.a);
      if (!p) return err(Errc::MissingPrice, "fRepay", 0, fr->token.a);
      if (fr->v - borrowed < *p * params.flash_fee) {
        return err(Errc::FeeTooLow, "fRepay", 0,
                   "returned " + rat_str(fr->v) + " for " + rat_str(borrowed));
      }
    } else if (const auto* fm = std::get_if<TxFMint>(&tx)) {
      open_mints[fm->token.a].push_back(fm->v);
    } else if (const auto* fu = std::get_if<TxFBurn>(&tx)) {
      auto& queue = open_mints[fu->token.a];
      if (queue.empty()) {
        return err(Errc::UnmatchedFlashRepay, "fRepayM", 0, tx_str(tx));
      }
      Rat minted = queue.front();
      queue.pop_front();
      if (fu->v != minted) {
        return err(Errc::FlashRepayMismatch, "fRepayM", 0,
                   "burned " + rat_str(fu->v) + " minted " + rat_str(minted));
      }
    }
  }
  for (const auto& [token, queue] : open_borrows) {
    if (!queue.empty()) {
      return err(Errc::UnmatchedFlashBorrow, "fBorrow", 0, token);
    }
  }
  for (const auto& [token, queue] : open_mints) {
    if (!queue.empty()) {
      return err(Errc::UnmatchedFlashBorrow, "fBorrowM", 0, token);
    }
  }
  return {};
}

Res<void> execute_group(NetworkState& ns, const std::vector<Tx>& txs) {
  if (txs.empty()) return err(Errc::EmptyGroup, "group", 0);
  std::optional<Account> signer;
  for (const Tx& tx : txs) {
    auto s = signer_of(tx);
    if (!s) return err(Errc::UnsignedInGroup, tx_kind(tx), 0, tx_str(tx));
    if (!signer) {
      signer = *s;
    } else if (*signer != *s) {
      return err(Errc::MixedSigners, tx_kind(tx), 0, tx_str(tx));
    }
  }
  auto auth = find_live_auth(
      ns.cfg, ns.group_auths, [&](const GroupAuth& a) { return a.txs == txs; },
      "group", "");
  if (!auth) return auth.error();
  if (auto flash = validate_flash_obligations(ns.cfg, ns.params, txs); !flash) {
    return flash.error();
  }
  Config working = ns.cfg;
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (auto r = apply_tx(working, ns.params, ns.rates, txs[i]); !r) {
      Err inner = r.error();
      return err(Errc::GroupAborted, inner.rule, inner.premise,
                 "step " + std::to_string(i) + ": " + inner.str());
    }
  }
  ns.cfg = std::move(working);
  (*auth)->used = true;
  snapshot_refresh(ns.cfg);
  return {};
}

namespace {

Res<void> run_entry(NetworkState& ns, const ScheduleEntry& entry) {
  if (entry.is_group()) {
    if (auto r = announce_group(ns, GroupAuth{entry.txs, entry.pred}); !r) {
      return r.error();
    }
    return execute_group(ns, entry.txs);
  }
  const Tx& tx = entry.txs.front();
  if (!is_unsigned(tx)) {
    if (auto r = announce(ns, Auth{tx, entry.pred}); !r) return r.error();
  }
  return execute_tx(ns, tx);
}

}  // namespace

std::vector<ScheduleItem> schedule(NetworkState& ns, const SchedulePlan& plan,
                                   const std::vector<ScheduleEntry>& entries) {
  std::vector<ScheduleItem> outcomes;
  auto run_at = [&](std::size_t index, bool inserted, const ScheduleEntry& entry) {
    if (entry.txs.empty()) return;
    ScheduleItem item{index, false, inserted, Err{}};
    if (auto r = run_entry(ns, entry)) {
      item.executed = true;
    } else {
      item.error = r.error();
    }
    outcomes.push_back(std::move(item));
  };

  switch (plan.policy) {
    case OrderingPolicy::Fifo: {
      for (std::size_t i = 0; i < entries.size(); ++i) run_at(i, false, entries[i]);
      break;
    }
    case OrderingPolicy::Reorder: {
      for (std::size_t i : plan.order) {
        if (i < entries.size()) run_at(i, false, entries[i]);
      }
      break;
    }
    case OrderingPolicy::Drop: {
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (std::find(plan.dropped.begin(), plan.dropped.end(), i) !=
            plan.dropped.end()) {
          continue;
        }
        run_at(i, false, entries[i]);
      }
      break;
    }
    case OrderingPolicy::Sandwich: {
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i == plan.victim) {
          for (const Tx& tx : plan.before) run_at(i, true, ScheduleEntry{{tx}});
          run_at(i, false, entries[i]);
          for (const Tx& tx : plan.after) run_at(i, true, ScheduleEntry{{tx}});
        } else {
          run_at(i, false, entries[i]);
        }
      }
      break;
    }
  }
  return outcomes;
}

}  // namespace defisem
