#include "occlunav/grounding.hpp"

#include <algorithm>
#include <cmath>

#include "occlunav/error.hpp"

namespace occlunav {

Pose coord_transform(const Pose& t_world, const Pose& t_local) { return compose(t_world, invert(t_local)); }

ScaleEstimate global_scale(const DepthImage& d_gt, const DepthImage& d_render) {
  if (d_gt.width != d_render.width || d_gt.height != d_render.height || d_gt.data.size() != d_render.data.size()) {
    throw Error(Errc::DimensionMismatch, "depth images differ in size");
  }
  std::vector<double> ratios;
  ratios.reserve(d_gt.data.size());
  for (std::size_t i = 0; i < d_gt.data.size(); ++i) {
    const double a = d_gt.data[i];
    const double b = d_render.data[i];
    if (std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0) ratios.push_back(a / b);
  }
  if (ratios.empty()) throw Error(Errc::NoValidPixels, "no pixel has both depths valid");

  const std::size_t n = ratios.size();
  const std::size_t mid = n / 2;
  std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(mid), ratios.end());
  double median = ratios[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  return {median, n};
}

GaussianScene align_imagined(const GaussianScene& scene, const Pose& local_anchor, const Pose& world_anchor,
                             double s) {
  if (!(s > 0.0)) throw Error(Errc::NonPositiveScale, "scale must be positive");
  if (scene.frame != Frame::LocalImagined) throw Error(Errc::FrameMismatch, "expected a LocalImagined scene");
  GaussianScene scaled = transform_scene(scene, Pose::identity(), s);
  Pose scaled_anchor = local_anchor;
  scaled_anchor.translation *= s;
  GaussianScene out = transform_scene(scaled, coord_transform(world_anchor, scaled_anchor), 1.0);
  out.frame = Frame::World;
  out.metric = true;
  return out;
}

std::vector<LabelAssignment> transfer_labels(const GaussianScene& scene, const Pose& cam, const Intrinsics& k,
                                             const LabelImage& sem, const DepthImage& d_gt,
                                             const DepthImage& d_render, const GroundingConfig& cfg,
                                             int view_index) {
  if (!sem.same_shape(k.width, k.height) || !d_gt.same_shape(k.width, k.height) ||
      !d_render.same_shape(k.width, k.height)) {
    throw Error(Errc::DimensionMismatch, "semantic/depth images must match the intrinsics size");
  }
  std::vector<LabelAssignment> out;
  const Mat3 rt = cam.rotation.transpose();
  const Vec3 tt = rt * cam.translation;
  for (std::size_t i = 0; i < scene.gaussians.size(); ++i) {
    const Vec3 pc = rt * scene.gaussians[i].position - tt;
    if (!(pc.z() > 0.0)) continue;
    const Vec2 p = project(pc, k);
    const double uf = std::floor(p.x() + 0.5);
    const double vf = std::floor(p.y() + 0.5);
    if (uf < 0.0 || vf < 0.0 || uf >= k.width || vf >= k.height) continue;
    const int u = static_cast<int>(uf);
    const int v = static_cast<int>(vf);
    const Label label = sem.at(u, v);
    if (label == kUnlabeled) continue;
    const double dr = d_render.at(u, v);
    const double dg = d_gt.at(u, v);
    if (!(std::isfinite(dr) && dr > 0.0 && std::isfinite(dg) && dg > 0.0)) continue;
    if (!(std::abs(dr - dg) < cfg.tau_d)) continue;
    out.push_back({i, label, view_index});
  }
  return out;
}

std::map<std::size_t, Label> vote_labels(std::span<const LabelAssignment> assignments) {
  std::map<std::size_t, std::map<Label, std::size_t>> tally;
  for (const auto& a : assignments) {
    if (a.label == kUnlabeled) continue;
    ++tally[a.gaussian_index][a.label];
  }
  std::map<std::size_t, Label> out;
  for (const auto& [index, counts] : tally) {
    Label best = kUnlabeled;
    std::size_t best_count = 0;
    // std::map iterates labels ascending, so strict '>' keeps the smallest id on ties.
    for (const auto& [label, count] : counts) {
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    }
    out.emplace(index, best);
  }
  return out;
}

}  // namespace occlunav
