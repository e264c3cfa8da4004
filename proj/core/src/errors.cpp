#include "defisem/errors.hpp"

namespace defisem {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InsufficientBalance: return "InsufficientBalance";
    case Errc::InsufficientPoolFunds: return "InsufficientPoolFunds";
    case Errc::InsufficientLoan: return "InsufficientLoan";
    case Errc::InsufficientSupply: return "InsufficientSupply";
    case Errc::Undercollateralized: return "Undercollateralized";
    case Errc::NotLiquidatable: return "NotLiquidatable";
    case Errc::Overliquidation: return "Overliquidation";
    case Errc::SeizeMismatch: return "SeizeMismatch";
    case Errc::UnknownToken: return "UnknownToken";
    case Errc::NotFree: return "NotFree";
    case Errc::NotClaim: return "NotClaim";
    case Errc::SameAccount: return "SameAccount";
    case Errc::SameToken: return "SameToken";
    case Errc::ReversedPair: return "ReversedPair";
    case Errc::UnknownPair: return "UnknownPair";
    case Errc::UnfundedPair: return "UnfundedPair";
    case Errc::RatioMismatch: return "RatioMismatch";
    case Errc::NonPositiveAmount: return "NonPositiveAmount";
    case Errc::NegativeAmount: return "NegativeAmount";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::MissingRate: return "MissingRate";
    case Errc::MissingPrice: return "MissingPrice";
    case Errc::FeeTooLow: return "FeeTooLow";
    case Errc::NotAuthorized: return "NotAuthorized";
    case Errc::PredicateFalse: return "PredicateFalse";
    case Errc::InvalidAuthorization: return "InvalidAuthorization";
    case Errc::FlashOutsideGroup: return "FlashOutsideGroup";
    case Errc::UnsignedInGroup: return "UnsignedInGroup";
    case Errc::MixedSigners: return "MixedSigners";
    case Errc::EmptyGroup: return "EmptyGroup";
    case Errc::UnmatchedFlashBorrow: return "UnmatchedFlashBorrow";
    case Errc::UnmatchedFlashRepay: return "UnmatchedFlashRepay";
    case Errc::FlashRepayMismatch: return "FlashRepayMismatch";
    case Errc::GroupAborted: return "GroupAborted";
    case Errc::PreconditionUnmet: return "PreconditionUnmet";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::ExpectationFailed: return "ExpectationFailed";
  }
  return "Unknown";
}

std::string Err::str() const {
  std::string out = errc_name(code);
  if (!rule.empty()) {
    out += " [" + rule;
    if (premise > 0) out += " premise " + std::to_string(premise);
    out += "]";
  }
  if (!detail.empty()) out += ": " + detail;
  return out;
}

}  // namespace defisem
