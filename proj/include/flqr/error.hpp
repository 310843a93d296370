#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flqr {

/// Failure categories raised by the library. The CLI prints the name and maps
/// numerical kinds to exit code 2.
enum class ErrorKind {
  InvalidInput,
  GridInvalid,
  GridMismatch,
  ParseError,
  DimensionMismatch,
  DomainError,
  DivergenceError,
  DegenerateBandwidth,
  FoldFailure,
  TuningFailure,
  InvalidTauGrid,
  SpectrumFailure,
  ConfigMismatch,
  InsufficientPaths,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::GridInvalid: return "GridInvalid";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DivergenceError: return "DivergenceError";
    case ErrorKind::DegenerateBandwidth: return "DegenerateBandwidth";
    case ErrorKind::FoldFailure: return "FoldFailure";
    case ErrorKind::TuningFailure: return "TuningFailure";
    case ErrorKind::InvalidTauGrid: return "InvalidTauGrid";
    case ErrorKind::SpectrumFailure: return "SpectrumFailure";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::InsufficientPaths: return "InsufficientPaths";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures that come from the numerics rather than from bad input.
  bool numerical() const noexcept {
    switch (kind_) {
      case ErrorKind::DivergenceError:
      case ErrorKind::DegenerateBandwidth:
      case ErrorKind::FoldFailure:
      case ErrorKind::TuningFailure:
      case ErrorKind::SpectrumFailure:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace flqr
