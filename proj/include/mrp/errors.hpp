#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrp {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  DimensionTooSmall,
  NotPositiveDefinite,
  NoConvergence,
  EmptySeries,
  LagTooLarge,
  ZeroVector,
  OutOfRange,
  SeriesTooShort,
  OutsideInterval,
  Infeasible,
  NearSingularPencil,
  MaxIterExceeded,
  ZeroDirection,
  BadSpec,
  RankDeficientRegression,
  IndexOutOfRange,
  ZeroInvestment,
  ZeroVariance,
  ParseError,
  NonPositivePrice,
  WindowTooLong,
  IoError,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::LagTooLarge: return "LagTooLarge";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::OutsideInterval: return "OutsideInterval";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NearSingularPencil: return "NearSingularPencil";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::RankDeficientRegression: return "RankDeficientRegression";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ZeroInvestment: return "ZeroInvestment";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (and tests) can branch on the kind of failure, not on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the budget-constrained solvers when the variance level cannot be
/// reached on the affine budget set. Carries the attainable range [nu_min, inf).
class InfeasibleError : public Error {
 public:
  InfeasibleError(double nu, double nu_min)
      : Error(ErrorCode::Infeasible,
              "variance level nu=" + std::to_string(nu) +
                  " is not attainable under the budget constraint; attainable range is (" +
                  std::to_string(nu_min) + ", inf)"),
        nu_(nu),
        nu_min_(nu_min) {}

  double nu() const noexcept { return nu_; }
  double nu_min() const noexcept { return nu_min_; }

 private:
  double nu_;
  double nu_min_;
};

/// Input-file errors pinned to a 1-based line (and column, when known).
class DataError : public Error {
 public:
  DataError(ErrorCode code, std::size_t line, std::optional<std::size_t> column, const std::string& what)
      : Error(code, "line " + std::to_string(line) +
                        (column ? ", column " + std::to_string(*column) : std::string()) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::optional<std::size_t> column_;
};

}  // namespace mrp
