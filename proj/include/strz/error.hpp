#pragma once

#include <stdexcept>
#include <string>

namespace strz {

/// Error categories. Each one maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  Usage = 2,
  Precondition = 3,
  DimensionOutOfRange = 4,
  WrongRegime = 5,
  SupportEscape = 6,
  Singularity = 7,
  UnsplittableSlice = 8,
  CannotPartition = 9,
  NonContraction = 10,
  Convergence = 11,
  EmptyConstraint = 12,
  CalibrationFailure = 13,
  DivergentNorm = 14,
  Io = 15,
  AcceptanceFailure = 16,
};

inline const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::DimensionOutOfRange: return "dimension-out-of-range";
    case ErrorKind::WrongRegime: return "wrong-regime";
    case ErrorKind::SupportEscape: return "support-escape";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::UnsplittableSlice: return "unsplittable-slice";
    case ErrorKind::CannotPartition: return "cannot-partition";
    case ErrorKind::NonContraction: return "non-contraction";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::EmptyConstraint: return "empty-constraint";
    case ErrorKind::CalibrationFailure: return "calibration-failure";
    case ErrorKind::DivergentNorm: return "divergent-norm";
    case ErrorKind::Io: return "io";
    case ErrorKind::AcceptanceFailure: return "acceptance-failure";
  }
  return "unknown";
}

}  // namespace strz
