#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcfd {

enum class ErrorKind {
  DegenerateSeries,
  IndexOutOfRange,
  WrongDirection,
  OddLength,
  LengthMismatch,
  NotNormalized,
  NotCentered,
  TooShort,
  TooFewBits,
  DegenerateInput,
  NoConvergence,
  UnconvergedFit,
  InvalidArgument,
  InvalidRho,
  InvalidPeriod,
  InvalidBitDepth,
  NonFiniteValue,
  ParseError,
  IoError,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::WrongDirection: return "WrongDirection";
    case ErrorKind::OddLength: return "OddLength";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::TooFewBits: return "TooFewBits";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnconvergedFit: return "UnconvergedFit";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidRho: return "InvalidRho";
    case ErrorKind::InvalidPeriod: return "InvalidPeriod";
    case ErrorKind::InvalidBitDepth: return "InvalidBitDepth";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rcfd
