#include "holderlab/error.hpp"

namespace holderlab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InadmissibleParameters: return "InadmissibleParameters";
    case ErrorKind::MissingHomogeneousExponent: return "MissingHomogeneousExponent";
    case ErrorKind::NonPositiveRadius: return "NonPositiveRadius";
    case ErrorKind::CylinderOutsideDomain: return "CylinderOutsideDomain";
    case ErrorKind::RegionOutsideDomain: return "RegionOutsideDomain";
    case ErrorKind::InvalidScaleParameter: return "InvalidScaleParameter";
    case ErrorKind::ScaledDomainEscapes: return "ScaledDomainEscapes";
    case ErrorKind::UnsupportedKind: return "UnsupportedKind";
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::UnstableConfig: return "UnstableConfig";
    case ErrorKind::OutsideValidity: return "OutsideValidity";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::InsufficientLevels: return "InsufficientLevels";
    case ErrorKind::AllZeroLevels: return "AllZeroLevels";
    case ErrorKind::PreconditionNeverHolds: return "PreconditionNeverHolds";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::CutoffNotCompact: return "CutoffNotCompact";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace holderlab
