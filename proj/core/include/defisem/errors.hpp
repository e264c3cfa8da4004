#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace defisem {

enum class Errc {
  InsufficientBalance,
  InsufficientPoolFunds,
  InsufficientLoan,
  InsufficientSupply,
  Undercollateralized,
  NotLiquidatable,
  Overliquidation,
  SeizeMismatch,
  UnknownToken,
  NotFree,
  NotClaim,
  SameAccount,
  SameToken,
  ReversedPair,
  UnknownPair,
  UnfundedPair,
  RatioMismatch,
  NonPositiveAmount,
  NegativeAmount,
  NonPositivePrice,
  NonPositiveRate,
  MissingRate,
  MissingPrice,
  FeeTooLow,
  NotAuthorized,
  PredicateFalse,
  InvalidAuthorization,
  FlashOutsideGroup,
  UnsignedInGroup,
  MixedSigners,
  EmptyGroup,
  UnmatchedFlashBorrow,
  UnmatchedFlashRepay,
  FlashRepayMismatch,
  GroupAborted,
  PreconditionUnmet,
  InstanceTooLarge,
  ParseError,
  InvalidScenario,
  ExpectationFailed,
};

const char* errc_name(Errc code);

// rule: name of the transition rule ("Dep", "Liq", ...); premise: 1-based
// index of the failed premise in that rule's documented order, 0 when the
// failure is not tied to a numbered premise.
struct Err {
  Errc code{};
  std::string rule;
  int premise = 0;
  std::string detail;

  std::string str() const;
};

inline Err err(Errc code, std::string rule, int premise, std::string detail = {}) {
  return Err{code, std::move(rule), premise, std::move(detail)};
}

template <typename T>
class Res {
 public:
  Res(T value) : v_(std::move(value)) {}
  Res(Err e) : v_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& operator*() { return std::get<T>(v_); }
  const T& operator*() const { return std::get<T>(v_); }
  T* operator->() { return &std::get<T>(v_); }
  const T* operator->() const { return &std::get<T>(v_); }

  const Err& error() const { return std::get<Err>(v_); }

 private:
  std::variant<T, Err> v_;
};

template <>
class Res<void> {
 public:
  Res() = default;
  Res(Err e) : e_(std::move(e)) {}

  bool ok() const { return !e_.has_value(); }
  explicit operator bool() const { return ok(); }

  const Err& error() const { return *e_; }

 private:
  std::optional<Err> e_;
};

// A soft premise that failed while running in report mode.
struct Violation {
  std::string rule;
  int premise = 0;
  std::string detail;
};

// enforce == true: every premise is checked and any failure aborts the rule.
// enforce == false: value guards (collateralization bounds, exact-amount
// equations, fee minimums, deposit ratio) are recorded in `sink` and the
// rule's effects still apply; structural premises (balances, token kinds,
// entry presence) always abort.
struct RuleOpts {
  bool enforce = true;
  std::vector<Violation>* sink = nullptr;

  void report(std::string rule, int premise, std::string detail) const {
    if (sink) sink->push_back({std::move(rule), premise, std::move(detail)});
  }
};

}  // namespace defisem
