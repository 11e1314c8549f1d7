#include "occlunav/error.hpp"

namespace occlunav {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveDepth: return "NonPositiveDepth";
    case Errc::InvalidFov: return "InvalidFov";
    case Errc::InvalidIntrinsics: return "InvalidIntrinsics";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::ConstraintViolation: return "ConstraintViolation";
    case Errc::NonPositiveScale: return "NonPositiveScale";
    case Errc::FrameMismatch: return "FrameMismatch";
    case Errc::NonPositiveVoxel: return "NonPositiveVoxel";
    case Errc::DegenerateAnchor: return "DegenerateAnchor";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::NoValidPixels: return "NoValidPixels";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ImaginationFailed: return "ImaginationFailed";
    case Errc::EmptyVisibleSet: return "EmptyVisibleSet";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyField: return "EmptyField";
    case Errc::PlanningFailed: return "PlanningFailed";
    case Errc::UnreachableEverything: return "UnreachableEverything";
    case Errc::EmptyResults: return "EmptyResults";
    case Errc::GenerationFailed: return "GenerationFailed";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace occlunav
