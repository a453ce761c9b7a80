// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace yosida {

enum class ErrorKind {
  InvalidOperator,
  InvalidInput,
  SingularResolvent,
  ExpOverflow,
  SpectrumFailure,
  BranchCutViolation,
  InconclusiveVerification,
  DivergentClassP,
  NotHyperbolic,
  TooLarge,
  LambdaTooSmall,
  ContourFailure,
  DiscretizationInconsistency,
  MeshMismatch,
  InvalidPerturbation,
  BaseNotHyperbolic,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported through this exception type. The
/// kind is stable and maps one-to-one onto the C API status codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Offending eigenvalue for SingularResolvent, when known.
  std::optional<std::complex<double>> eigenvalue;

private:
  ErrorKind kind_;
};

}  // namespace yosida
