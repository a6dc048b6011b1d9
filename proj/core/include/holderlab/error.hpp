#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holderlab {

/// Failure categories raised by the library. Each module documents which of
/// these it can throw; the CLI maps them onto exit codes.
enum class ErrorKind {
  InvalidArgument,
  InadmissibleParameters,
  MissingHomogeneousExponent,
  NonPositiveRadius,
  CylinderOutsideDomain,
  RegionOutsideDomain,
  InvalidScaleParameter,
  ScaledDomainEscapes,
  UnsupportedKind,
  EvaluationFailure,
  OutOfDomain,
  EmptyIntersection,
  BlowUp,
  UnstableConfig,
  OutsideValidity,
  GridTooCoarse,
  InsufficientLevels,
  AllZeroLevels,
  PreconditionNeverHolds,
  NotNormalized,
  CutoffNotCompact,
  ConfigInvalid,
  IoFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace holderlab
