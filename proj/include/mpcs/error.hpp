#ifndef MPCS_ERROR_HPP
#define MPCS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpcs {

enum class ErrorCode {
  DuplicateEdge,
  SelfLoop,
  LabelOutOfRange,
  ParseError,
  DisconnectedGraph,
  ConvergenceFailure,
  NotAnEigenvalue,
  WitnessSamplingFailed,
  NotATree,
  NotATreeLaplacian,
  PreconditionUnmet,
  CandidateNotTransversal,
  CandidateNotControllable,
  CapExceeded,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorCode::WitnessSamplingFailed: return "WitnessSamplingFailed";
    case ErrorCode::NotATree: return "NotATree";
    case ErrorCode::NotATreeLaplacian: return "NotATreeLaplacian";
    case ErrorCode::PreconditionUnmet: return "PreconditionUnmet";
    case ErrorCode::CandidateNotTransversal: return "CandidateNotTransversal";
    case ErrorCode::CandidateNotControllable: return "CandidateNotControllable";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures that stem from floating-point trouble rather than bad input.
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::ConvergenceFailure || code_ == ErrorCode::WitnessSamplingFailed;
  }

 private:
  ErrorCode code_;
};

}  // namespace mpcs

#endif  // MPCS_ERROR_HPP
