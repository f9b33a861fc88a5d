#pragma once

#include <stdexcept>
#include <string>

namespace cosparse {

// Base class for all recoverable failures raised by the library. The CLI
// reports these as a single-line JSON object on stderr; InvalidArgument and
// IoError exit 2 (usage), everything else exits 1 (domain failure).
struct Error : std::runtime_error {
  Error(std::string error_code, const std::string& message)
      : std::runtime_error(message), code(std::move(error_code)) {}
  std::string code;
};

// The analysis operator has a zero (or numerically zero) smallest singular
// value, so it is not a frame of R^d.
struct NotAFrame : Error {
  explicit NotAFrame(const std::string& message) : Error("NotAFrame", message) {}
};

// A random construction produced a degenerate object (e.g. a rank-deficient
// Gaussian draw) and cannot proceed.
struct DegenerateDraw : Error {
  explicit DegenerateDraw(const std::string& message) : Error("DegenerateDraw", message) {}
};

// An operation that needs a nontrivial kernel was handed a matrix whose
// kernel is {0}.
struct EmptyKernel : Error {
  explicit EmptyKernel(const std::string& message) : Error("EmptyKernel", message) {}
};

// A matrix that must have full rank for the requested operation does not.
struct RankDeficient : Error {
  explicit RankDeficient(const std::string& message) : Error("RankDeficient", message) {}
};

// Rejection sampling failed to produce an admissible sample within the
// configured proposal budget.
struct RejectionStall : Error {
  explicit RejectionStall(const std::string& message) : Error("RejectionStall", message) {}
};

// Invalid argument values (negative sizes, out-of-range parameters, ...).
struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& message) : Error("InvalidArgument", message) {}
};

// I/O and parse failures for CSV/JSON inputs.
struct IoError : Error {
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

}  // namespace cosparse
