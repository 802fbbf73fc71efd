#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bealloc {

enum class ErrorCode {
  EmptyPrices,
  TooFewEnterprises,
  NonPositivePrice,
  BoundsInverted,
  BudgetInfeasible,
  ParseError,
  InvalidInput,
  Overflow,
  DomainError,
  NoConvergence,
  DegenerateBoundary,
  RepairFailed,
  IndexRange,
  CapExceeded,
  LowAcceptance,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyPrices: return "EmptyPrices";
    case ErrorCode::TooFewEnterprises: return "TooFewEnterprises";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::BoundsInverted: return "BoundsInverted";
    case ErrorCode::BudgetInfeasible: return "BudgetInfeasible";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::RepairFailed: return "RepairFailed";
    case ErrorCode::IndexRange: return "IndexRange";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::LowAcceptance: return "LowAcceptance";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code selects the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bealloc
