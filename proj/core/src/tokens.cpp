#include "defisem/tokens.hpp"

namespace defisem {

std::string Token::str() const {
  switch (kind) {
    case Kind::Free: return a;
    case Kind::LpClaim: return "m(" + a + ")";
    case Kind::AmmShare: return "pair(" + a + "," + b + ")";
  }
  return a;
}

std::optional<Token> Token::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  auto inner = [&](std::string_view prefix) -> std::optional<std::string_view> {
    if (text.size() <= prefix.size() + 1) return std::nullopt;
    if (text.substr(0, prefix.size()) != prefix) return std::nullopt;
    if (text[prefix.size()] != '(' || text.back() != ')') return std::nullopt;
    return text.substr(prefix.size() + 1, text.size() - prefix.size() - 2);
  };
  if (auto body = inner("m")) {
    if (body->empty() || body->find(',') != std::string_view::npos) return std::nullopt;
    return Token::lp_claim(std::string(*body));
  }
  if (auto body = inner("pair")) {
    auto comma = body->find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    std::string_view t0 = body->substr(0, comma);
    std::string_view t1 = body->substr(comma + 1);
    if (t0.empty() || t1.empty()) return std::nullopt;
    if (t1.find(',') != std::string_view::npos) return std::nullopt;
    return Token::amm_share(std::string(t0), std::string(t1));
  }
  if (text.find_first_of("(),") != std::string_view::npos) return std::nullopt;
  return Token::free(std::string(text));
}

}  // namespace defisem
