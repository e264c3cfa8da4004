#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace defisem {

// Token identities are structural:
//   Free      base token, e.g. "tau0"
//   LpClaim   lending-pool claim token on a free underlying, printed "m(tau0)"
//   AmmShare  AMM share token of an ordered pair, printed "pair(tau0,tau1)"
struct Token {
  enum class Kind : unsigned char { Free, LpClaim, AmmShare };

  Kind kind = Kind::Free;
  std::string a;
  std::string b;

  static Token free(std::string name) { return {Kind::Free, std::move(name), {}}; }
  static Token lp_claim(std::string underlying) {
    return {Kind::LpClaim, std::move(underlying), {}};
  }
  static Token amm_share(std::string t0, std::string t1) {
    return {Kind::AmmShare, std::move(t0), std::move(t1)};
  }

  bool is_free() const { return kind == Kind::Free; }
  bool is_lp_claim() const { return kind == Kind::LpClaim; }
  bool is_amm_share() const { return kind == Kind::AmmShare; }

  std::string str() const;
  static std::optional<Token> parse(std::string_view text);

  friend auto operator<=>(const Token&, const Token&) = default;
};

}  // namespace defisem
