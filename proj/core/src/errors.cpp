#include "divisim/errors.hpp"

namespace divisim {

std::string_view errorName(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedTransform: return "UnsupportedTransform";
    case ErrorCode::UnsupportedDensity: return "UnsupportedDensity";
    case ErrorCode::UnsupportedQuantile: return "UnsupportedQuantile";
    case ErrorCode::UnsupportedCdf: return "UnsupportedCdf";
    case ErrorCode::NotParametricallyDivisible: return "NotParametricallyDivisible";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonPositiveSample: return "NonPositiveSample";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::RowSumViolation: return "RowSumViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Error";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail) {
  std::string out{errorName(code)};
  if (!detail.empty()) {
    out += detail.front() == ' ' ? "" : ": ";
    out += detail;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace divisim
