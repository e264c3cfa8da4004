#include "defisem/txn.hpp"

#include "defisem/amm.hpp"
#include "defisem/ledger.hpp"
#include "defisem/lending.hpp"

namespace defisem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::optional<Account> signer_of(const Tx& tx) {
  return std::visit(
      overloaded{
          [](const TxTrf& t) -> std::optional<Account> { return t.from; },
          [](const TxPx&) -> std::optional<Account> { return std::nullopt; },
          [](const TxInt&) -> std::optional<Account> { return std::nullopt; },
          [](const TxLiq& t) -> std::optional<Account> { return t.liquidator; },
          [](const TxMtrf& t) -> std::optional<Account> { return t.from; },
          [](const auto& t) -> std::optional<Account> { return t.user; },
      },
      tx);
}

bool is_flash(const Tx& tx) {
  return std::holds_alternative<TxFBorrow>(tx) || std::holds_alternative<TxFRepay>(tx) ||
         std::holds_alternative<TxFMint>(tx) || std::holds_alternative<TxFBurn>(tx);
}

bool is_unsigned(const Tx& tx) {
  return std::holds_alternative<TxPx>(tx) || std::holds_alternative<TxInt>(tx);
}

const char* tx_kind(const Tx& tx) {
  return std::visit(
      overloaded{
          [](const TxTrf&) { return "Trf"; },
          [](const TxPx&) { return "Px"; },
          [](const TxDep&) { return "Dep"; },
          [](const TxBor&) { return "Bor"; },
          [](const TxInt&) { return "Int"; },
          [](const TxRep&) { return "Rep"; },
          [](const TxRdm&) { return "Rdm"; },
          [](const TxLiq&) { return "Liq"; },
          [](const TxMtrf&) { return "Mtrf"; },
          [](const TxAmmDep&) { return "AmmDep"; },
          [](const TxAmmSwap&) { return "AmmSwap"; },
          [](const TxAmmRdm&) { return "AmmRdm"; },
          [](const TxFBorrow&) { return "fBorrow"; },
          [](const TxFRepay&) { return "fRepay"; },
          [](const TxFMint&) { return "fBorrowM"; },
          [](const TxFBurn&) { return "fRepayM"; },
      },
      tx);
}

std::string tx_str(const Tx& tx) {
  return std::visit(
      overloaded{
          [](const TxTrf& t) {
            return t.from + ":Trf(" + t.to + "," + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxPx& t) {
            std::string out = "Px(";
            bool first = true;
            for (const auto& [token, p] : t.quotes) {
              if (!first) out += ",";
              out += token + "=" + rat_str(p);
              first = false;
            }
            return out + ")";
          },
          [](const TxDep& t) {
            return t.user + ":Dep(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxBor& t) {
            return t.user + ":Bor(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxInt&) { return std::string("Int"); },
          [](const TxRep& t) {
            return t.user + ":Rep(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxRdm& t) {
            return t.user + ":Rdm(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxLiq& t) {
            std::string out = t.liquidator + ":Liq(" + t.victim + "," + rat_str(t.v) +
                              ":" + t.repaid.str() + "," + t.seized.str();
            if (t.seize_amount) out += "," + rat_str(*t.seize_amount);
            return out + ")";
          },
          [](const TxMtrf& t) {
            return t.from + ":Mtrf(" + t.to + "," + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxAmmDep& t) {
            return t.user + ":AmmDep(" + rat_str(t.v0) + ":" + t.t0.str() + "," +
                   rat_str(t.v1) + ":" + t.t1.str() + ")";
          },
          [](const TxAmmSwap& t) {
            return t.user + ":AmmSwap(" + rat_str(t.v_in) + ":" + t.t_in.str() + "->" +
                   t.t_out.str() + ")";
          },
          [](const TxAmmRdm& t) {
            return t.user + ":AmmRdm(" + rat_str(t.v) + ":" + t.share.str() + ")";
          },
          [](const TxFBorrow& t) {
            return t.user + ":fBorrow(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxFRepay& t) {
            return t.user + ":fRepay(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxFMint& t) {
            return t.user + ":fBorrowM(" + rat_str(t.v) + ":" + t.token.str() + ")";
          },
          [](const TxFBurn& t) {
            return t.user + ":fRepayM(" + rat_str(t.v) + ":" + t.token.str() + "," +
                   rat_str(t.fee_amount) + ":" + t.fee_token.str() + ")";
          },
      },
      tx);
}

Res<void> apply_tx(Config& cfg, const LpParams& params, const InterestRates& rates,
                   const Tx& tx, const RuleOpts& opts) {
  return std::visit(
      overloaded{
          [&](const TxTrf& t) { return transfer(cfg, t.from, t.to, t.v, t.token); },
          [&](const TxPx& t) { return set_prices(cfg, t.quotes); },
          [&](const TxDep& t) { return deposit(cfg, params, t.user, t.v, t.token); },
          [&](const TxBor& t) { return borrow(cfg, params, t.user, t.v, t.token, opts); },
          [&](const TxInt&) { return accrue_interest(cfg, rates); },
          [&](const TxRep& t) { return repay(cfg, params, t.user, t.v, t.token); },
          [&](const TxRdm& t) { return redeem(cfg, params, t.user, t.v, t.token, opts); },
          [&](const TxLiq& t) {
            return liquidate(cfg, params, t.liquidator, t.victim, t.v, t.repaid,
                             t.seized, t.seize_amount, opts);
          },
          [&](const TxMtrf& t) {
            return transfer_claim(cfg, params, t.from, t.to, t.v, t.token, opts);
          },
          [&](const TxAmmDep& t) {
            return amm_deposit(cfg, t.user, t.t0, t.t1, t.v0, t.v1, opts);
          },
          [&](const TxAmmSwap& t) {
            return amm_swap(cfg, params, t.user, t.t_in, t.t_out, t.v_in);
          },
          [&](const TxAmmRdm& t) { return amm_redeem(cfg, t.user, t.share, t.v); },
          [&](const TxFBorrow& t) { return flash_borrow(cfg, t.user, t.v, t.token); },
          [&](const TxFRepay& t) { return flash_repay(cfg, t.user, t.v, t.token); },
          [&](const TxFMint& t) { return flash_mint(cfg, t.user, t.v, t.token); },
          [&](const TxFBurn& t) {
            return flash_burn(cfg, params, t.user, t.v, t.token, t.fee_amount,
                              t.fee_token, opts);
          },
      },
      tx);
}

}  // namespace defisem
