#pragma once

#include <memory>
#include <string>

#include "defisem/state.hpp"

namespace defisem {

// Authorization predicates: comparisons over state observations, closed
// under conjunction, disjunction, and negation.
struct Expr {
  enum class Kind : unsigned char { Const, Price, CollOf, Util, ExchRate };

  Kind kind = Kind::Const;
  Rat value;
  std::string a;
  std::string b;

  static Expr constant(Rat v) { return {Kind::Const, std::move(v), {}, {}}; }
  static Expr price(std::string token) { return {Kind::Price, Rat(0), std::move(token), {}}; }
  static Expr coll_of(std::string user) { return {Kind::CollOf, Rat(0), std::move(user), {}}; }
  static Expr util(std::string token) { return {Kind::Util, Rat(0), std::move(token), {}}; }
  static Expr exch_rate(std::string base, std::string quote) {
    return {Kind::ExchRate, Rat(0), std::move(base), std::move(quote)};
  }
};

enum class CmpOp : unsigned char { Lt, Le, Eq, Ge, Gt };

struct Pred {
  enum class Kind : unsigned char { True, False, Cmp, And, Or, Not };

  Kind kind = Kind::True;
  CmpOp op = CmpOp::Eq;
  Expr lhs;
  Expr rhs;
  std::shared_ptr<const Pred> left;
  std::shared_ptr<const Pred> right;

  static Pred truth() { return Pred{}; }
  static Pred falsity() {
    Pred p;
    p.kind = Kind::False;
    return p;
  }
  static Pred cmp(CmpOp op, Expr lhs, Expr rhs);
  static Pred conj(Pred a, Pred b);
  static Pred disj(Pred a, Pred b);
  static Pred negate(Pred a);
};

// Price reads the external oracle; CollOf values positions through
// valuation_price (so it follows the snapshot under amm-snapshot sourcing).
Res<ExtRat> eval_expr(const Config& cfg, const Expr& expr);
Res<bool> eval_pred(const Config& cfg, const Pred& pred);

}  // namespace defisem
