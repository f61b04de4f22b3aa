#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmt {

enum class ErrorCode {
  NotSymmetric,
  NotPSD,
  DistinctnessViolation,
  TailNotCertified,
  NoConvergence,
  TooLarge,
  MalformedStep,
  BadParams,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DistinctnessViolation: return "DistinctnessViolation";
    case ErrorCode::TailNotCertified: return "TailNotCertified";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MalformedStep: return "MalformedStep";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mmt
