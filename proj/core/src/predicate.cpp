#include "defisem/predicate.hpp"

#include "defisem/amm.hpp"

namespace defisem {

Pred Pred::cmp(CmpOp op, Expr lhs, Expr rhs) {
  Pred p;
  p.kind = Kind::Cmp;
  p.op = op;
  p.lhs = std::move(lhs);
  p.rhs = std::move(rhs);
  return p;
}

Pred Pred::conj(Pred a, Pred b) {
  Pred p;
  p.kind = Kind::And;
  p.left = std::make_shared<const Pred>(std::move(a));
  p.right = std::make_shared<const Pred>(std::move(b));
  return p;
}

Pred Pred::disj(Pred a, Pred b) {
  Pred p;
  p.kind = Kind::Or;
  p.left = std::make_shared<const Pred>(std::move(a));
  p.right = std::make_shared<const Pred>(std::move(b));
  return p;
}

Pred Pred::negate(Pred a) {
  Pred p;
  p.kind = Kind::Not;
  p.left = std::make_shared<const Pred>(std::move(a));
  return p;
}

Res<ExtRat> eval_expr(const Config& cfg, const Expr& expr) {
  switch (expr.kind) {
    case Expr::Kind::Const:
      return ExtRat::of(expr.value);
    case Expr::Kind::Price: {
      auto p = price_of(cfg, expr.a);
      if (!p) return err(Errc::MissingPrice, "pred", 0, expr.a);
      return ExtRat::of(*p);
    }
    case Expr::Kind::CollOf: {
      auto coll = collateralization(cfg, expr.a);
      if (!coll) return coll.error();
      return *coll;
    }
    case Expr::Kind::Util:
      return ExtRat::of(utilization(cfg, expr.a));
    case Expr::Kind::ExchRate: {
      auto rate = amm_exchange_rate(cfg, Token::free(expr.a), Token::free(expr.b));
      if (!rate) return rate.error();
      return ExtRat::of(*rate);
    }
  }
  return err(Errc::ParseError, "pred", 0, "expr");
}

Res<bool> eval_pred(const Config& cfg, const Pred& pred) {
  switch (pred.kind) {
    case Pred::Kind::True:
      return true;
    case Pred::Kind::False:
      return false;
    case Pred::Kind::Cmp: {
      auto lhs = eval_expr(cfg, pred.lhs);
      if (!lhs) return lhs.error();
      auto rhs = eval_expr(cfg, pred.rhs);
      if (!rhs) return rhs.error();
      switch (pred.op) {
        case CmpOp::Lt: return *lhs < *rhs;
        case CmpOp::Le: return *lhs <= *rhs;
        case CmpOp::Eq: return *lhs == *rhs;
        case CmpOp::Ge: return *lhs >= *rhs;
        case CmpOp::Gt: return *lhs > *rhs;
      }
      return err(Errc::ParseError, "pred", 0, "cmp");
    }
    case Pred::Kind::And: {
      auto l = eval_pred(cfg, *pred.left);
      if (!l) return l.error();
      if (!*l) return false;
      return eval_pred(cfg, *pred.right);
    }
    case Pred::Kind::Or: {
      auto l = eval_pred(cfg, *pred.left);
      if (!l) return l.error();
      if (*l) return true;
      return eval_pred(cfg, *pred.right);
    }
    case Pred::Kind::Not: {
      auto l = eval_pred(cfg, *pred.left);
      if (!l) return l.error();
      return !*l;
    }
  }
  return err(Errc::ParseError, "pred", 0, "pred");
}

}  // namespace defisem
