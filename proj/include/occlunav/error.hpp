#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occlunav {

/// Failure categories raised by the library. Each maps to one named
/// precondition or runtime failure of an operation.
enum class Errc {
  NonPositiveDepth,
  InvalidFov,
  InvalidIntrinsics,
  MalformedRow,
  ConstraintViolation,
  NonPositiveScale,
  FrameMismatch,
  NonPositiveVoxel,
  DegenerateAnchor,
  InvalidParams,
  NoValidPixels,
  DimensionMismatch,
  ImaginationFailed,
  EmptyVisibleSet,
  LengthMismatch,
  EmptyField,
  PlanningFailed,
  UnreachableEverything,
  EmptyResults,
  GenerationFailed,
  ConfigError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace occlunav
