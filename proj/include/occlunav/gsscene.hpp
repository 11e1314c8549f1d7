#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "occlunav/geometry.hpp"

namespace occlunav {

using Label = std::uint32_t;

/// Label id reserved for "no semantic prediction" / "no hit".
inline constexpr Label kUnlabeled = 0;

/// One scene primitive: [x, y, z, r, g, b, rad, opa, label].
struct Gaussian9 {
  Vec3 position = Vec3::Zero();
  Vec3 color = Vec3::Zero();  // r, g, b in [0, 1]
  double radius = 0.1;
  double opacity = 1.0;
  Label label = kUnlabeled;

  bool operator==(const Gaussian9&) const = default;
};

/// Throws Errc::ConstraintViolation when rad <= 0 or opacity/colors leave [0, 1].
void validate(const Gaussian9& g);

enum class Frame { World, LocalImagined };

struct GaussianScene {
  std::vector<Gaussian9> gaussians;
  Frame frame = Frame::World;
  bool metric = true;

  std::size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }
  bool operator==(const GaussianScene&) const = default;
};

template <typename T, int Channels = 1>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h * Channels, fill) {}

  bool in_bounds(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
  std::size_t index(int u, int v) const { return (static_cast<std::size_t>(v) * width + u) * Channels; }
  T& at(int u, int v, int c = 0) { return data[index(u, v) + c]; }
  const T& at(int u, int v, int c = 0) const { return data[index(u, v) + c]; }
  bool same_shape(int w, int h) const { return width == w && height == h; }

  bool operator==(const Image&) const = default;
};

/// Metric depth per pixel; values <= 0 mark invalid pixels.
using DepthImage = Image<double>;
/// Semantic id per pixel; 0 means no hit / no prediction.
using LabelImage = Image<Label>;
using RgbImage = Image<std::uint8_t, 3>;

struct RenderResult {
  DepthImage depth;
  LabelImage labels;
  RgbImage rgb;
  /// Index of the winning Gaussian per pixel, -1 where nothing was drawn.
  /// Only filled by render_indexed().
  std::vector<std::int32_t> winners;
};

// --- persistence -----------------------------------------------------------

inline constexpr const char* kSceneCsvHeader = "x,y,z,r,g,b,rad,opa,label";

void write_csv(std::ostream& out, const GaussianScene& scene);
GaussianScene read_csv(std::istream& in);
void save_csv(const GaussianScene& scene, const std::filesystem::path& path);
GaussianScene load_csv(const std::filesystem::path& path);

/// Parses one data row. Throws MalformedRow / ConstraintViolation.
Gaussian9 parse_csv_row(const std::string& line);

// --- geometry on scenes ----------------------------------------------------

/// x' = R (s x) + t, rad' = s rad. Throws Errc::NonPositiveScale for s <= 0.
GaussianScene transform_scene(const GaussianScene& scene, const Pose& t, double s);

/// Opaque disk splatting. Gaussians with opacity >= 0.5 and camera-frame
/// z > 0 cover every integer pixel within max(1, fx rad / z) of their
/// projected center; nearer splats win.
RenderResult render(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k);
RenderResult render_indexed(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k);
DepthImage render_depth(const GaussianScene& scene, const Pose& camera_pose, const Intrinsics& k);

inline constexpr double kOpacityThreshold = 0.5;

/// Keep-first voxel dedup over the concatenation of `scenes`. All inputs must
/// be World/metric (Errc::FrameMismatch otherwise).
GaussianScene merge_scenes(std::span<const GaussianScene> scenes, double eps_merge);

/// Same as merge_scenes; also reports which input each survivor came from.
struct TaggedMerge {
  GaussianScene scene;
  std::vector<std::uint32_t> source;  // index into the input list
};
TaggedMerge merge_scenes_tagged(std::span<const GaussianScene> scenes, double eps_merge);

/// Keep-first voxel dedup of a single scene. Throws Errc::NonPositiveVoxel.
GaussianScene downsample(const GaussianScene& scene, double voxel);

}  // namespace occlunav
