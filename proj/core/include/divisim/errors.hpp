#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divisim {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorCode {
  DomainError,
  UnsupportedTransform,
  UnsupportedDensity,
  UnsupportedQuantile,
  UnsupportedCdf,
  NotParametricallyDivisible,
  EmptySample,
  NonPositiveSample,
  DegenerateSample,
  InsufficientData,
  GridTooSmall,
  Infeasible,
  NotConverged,
  RowSumViolation,
  DimensionMismatch,
  LengthMismatch,
  ParseError,
};

std::string_view errorName(ErrorCode code) noexcept;

/// Every library failure is a divisim::Error. what() reads "<Name>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail = {});

}  // namespace divisim
