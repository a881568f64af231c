#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnls {

enum class ErrorKind {
  InvalidArgument,
  PairLambdaMismatch,
  NonzeroForbiddenCoupling,
  ZeroEps,
  GridMismatch,
  GridTooCoarse,
  NoConvergence,
  SignChange,
  SingularJacobian,
  EigSolverFailure,
  OutOfWindow,
  ZeroDenominator,
  ZeroState,
  NotCritical,
  ImmediateFailure,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PairLambdaMismatch: return "PairLambdaMismatch";
    case ErrorKind::NonzeroForbiddenCoupling: return "NonzeroForbiddenCoupling";
    case ErrorKind::ZeroEps: return "ZeroEps";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SignChange: return "SignChange";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::EigSolverFailure: return "EigSolverFailure";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::ZeroState: return "ZeroState";
    case ErrorKind::NotCritical: return "NotCritical";
    case ErrorKind::ImmediateFailure: return "ImmediateFailure";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace cnls
