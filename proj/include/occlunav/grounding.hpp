#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "occlunav/geometry.hpp"
#include "occlunav/gsscene.hpp"

namespace occlunav {

struct ScaleEstimate {
  double s = 1.0;
  std::size_t n_valid = 0;
};

struct LabelAssignment {
  std::size_t gaussian_index = 0;
  Label label = kUnlabeled;
  int view_index = 0;

  bool operator==(const LabelAssignment&) const = default;
};

struct GroundingConfig {
  double tau_d = 0.1;  // depth-consistency tolerance [m]
};

/// Transform taking local-frame coordinates to world coordinates, given the
/// same anchor camera expressed in both frames: t_world * inverse(t_local).
Pose coord_transform(const Pose& t_world, const Pose& t_local);

/// Median of d_gt / d_render over pixels where both depths are finite and
/// positive. Even counts average the two middle order statistics.
/// Throws Errc::DimensionMismatch or Errc::NoValidPixels.
ScaleEstimate global_scale(const DepthImage& d_gt, const DepthImage& d_render);

/// Scales a LocalImagined scene (and the anchor translation) by s, then maps
/// it into the world so that the local anchor lands on the world anchor.
/// Throws Errc::NonPositiveScale or Errc::FrameMismatch.
GaussianScene align_imagined(const GaussianScene& scene, const Pose& local_anchor, const Pose& world_anchor, double s);

/// Lifts per-pixel labels onto Gaussians seen from `cam`. A Gaussian gets the
/// label at its nearest projected pixel when that pixel carries a label, both
/// depths there are valid and |d_render - d_gt| < tau_d.
/// Throws Errc::DimensionMismatch when images disagree with `k`.
std::vector<LabelAssignment> transfer_labels(const GaussianScene& scene, const Pose& cam, const Intrinsics& k,
                                             const LabelImage& sem, const DepthImage& d_gt,
                                             const DepthImage& d_render, const GroundingConfig& cfg,
                                             int view_index = 0);

/// Per-Gaussian majority label; ties go to the smallest label id.
std::map<std::size_t, Label> vote_labels(std::span<const LabelAssignment> assignments);

}  // namespace occlunav
