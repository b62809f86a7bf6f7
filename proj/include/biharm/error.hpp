#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biharm {

enum class ErrorCode {
  // input / domain
  ParseError,
  BadDimension,
  DisconnectedDomain,
  OverlappingCells,
  NonFiniteValue,
  // finite elements
  RefinementOverflow,
  BadMultiIndex,
  MeshMismatch,
  // eigensolver
  MassNotPD,
  ConvergenceFailure,
  CountTooLarge,
  ZeroVector,
  // trial functions
  NoZeroFound,
  NotOdd,
  SymmetryMissing,
  RankDeficientSubspace,
  // verification
  KernelDefect,
  NonMonotoneLadder,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::OverlappingCells: return "OverlappingCells";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::RefinementOverflow: return "RefinementOverflow";
    case ErrorCode::BadMultiIndex: return "BadMultiIndex";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::MassNotPD: return "MassNotPD";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::CountTooLarge: return "CountTooLarge";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoZeroFound: return "NoZeroFound";
    case ErrorCode::NotOdd: return "NotOdd";
    case ErrorCode::SymmetryMissing: return "SymmetryMissing";
    case ErrorCode::RankDeficientSubspace: return "RankDeficientSubspace";
    case ErrorCode::KernelDefect: return "KernelDefect";
    case ErrorCode::NonMonotoneLadder: return "NonMonotoneLadder";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace biharm
