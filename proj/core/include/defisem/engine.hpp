#pragma once

#include <cstddef>
#include <vector>

#include "defisem/predicate.hpp"
#include "defisem/txn.hpp"

namespace defisem {

bool pred_equal(const Pred& a, const Pred& b);

// An authorization is a signature over one exact transaction (or one exact
// transaction sequence), guarded by a predicate evaluated on the state at
// execution time. Authorizations are single-use by default: a committed
// execution marks the record used and it no longer matches. The record
// itself is never removed, and a used record still blocks re-announcing the
// identical authorization (set semantics), so knowledge never shrinks.
// A multi_use authorization stays live across commits.
struct Auth {
  Tx tx;
  Pred pred = Pred::truth();
  bool multi_use = false;
  bool used = false;

  friend bool operator==(const Auth& a, const Auth& b) {
    return a.tx == b.tx && a.multi_use == b.multi_use && pred_equal(a.pred, b.pred);
  }
};

struct GroupAuth {
  std::vector<Tx> txs;
  Pred pred = Pred::truth();
  bool multi_use = false;
  bool used = false;

  friend bool operator==(const GroupAuth& a, const GroupAuth& b) {
    return a.txs == b.txs && a.multi_use == b.multi_use && pred_equal(a.pred, b.pred);
  }
};

struct NetworkState {
  Config cfg;
  LpParams params;
  InterestRates rates;
  std::vector<Auth> auths;
  std::vector<GroupAuth> group_auths;
};

// Registers an authorization (set semantics: announcing a duplicate is a
// no-op). The transaction must carry a signer.
Res<void> announce(NetworkState& ns, Auth auth);
Res<void> announce_group(NetworkState& ns, GroupAuth auth);

// Executes one top-level transaction. Unsigned transactions (Px, Int) run
// without authorization; signed ones require a matching announced
// authorization whose predicate holds now. Flash transactions are only
// legal inside groups. On success the AMM snapshot is refreshed.
Res<void> execute_tx(NetworkState& ns, const Tx& tx);

// Executes an atomic transaction group against a matching group
// authorization. All transactions must share one signer; unsigned
// transactions are not allowed inside groups. Flash borrows must be repaid
// within the group: free-token repayments match borrows of the same token
// first-in-first-out and must return at least v + p(t) * C_fee; claim-token
// burns match mints of the same token FIFO and must burn exactly the minted
// amount. Any failure leaves the network state untouched. The snapshot is
// only refreshed after the whole group commits, so collateralization inside
// the group reads the entry snapshot.
Res<void> execute_group(NetworkState& ns, const std::vector<Tx>& txs);

// Checks the flash matching discipline of a transaction sequence against
// the given prices, without executing it.
Res<void> validate_flash_obligations(const Config& cfg, const LpParams& params,
                                     const std::vector<Tx>& txs);

enum class OrderingPolicy : unsigned char { Fifo, Reorder, Drop, Sandwich };

struct ScheduleEntry {
  std::vector<Tx> txs;
  Pred pred = Pred::truth();

  bool is_group() const { return txs.size() > 1; }
};

struct SchedulePlan {
  OrderingPolicy policy = OrderingPolicy::Fifo;
  std::vector<std::size_t> order;
  std::vector<std::size_t> dropped;
  std::size_t victim = 0;
  std::vector<Tx> before;
  std::vector<Tx> after;
};

struct ScheduleItem {
  std::size_t index = 0;
  bool executed = false;
  bool inserted = false;
  Err error;
};

// Announces every entry, then executes them in the order the policy
// dictates. Failed transactions are recorded and skipped; execution
// continues. Sandwich inserts the attacker's transactions (also announced)
// immediately around the victim entry.
std::vector<ScheduleItem> schedule(NetworkState& ns, const SchedulePlan& plan,
                                   const std::vector<ScheduleEntry>& entries);

}  // namespace defisem
