#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgevo/edge_model.hpp"
#include "edgevo/geometry.hpp"
#include "edgevo/image.hpp"

namespace edgevo {

struct Wave {
  Eigen::Vector2d frequency = Eigen::Vector2d::Zero();  // cycles per scene unit
  double phase = 0.0;
};

/// Band-limited procedural albedo: base + amplitude · mean of sinusoids.
struct Texture {
  double base = 128.0;
  double amplitude = 0.0;
  std::vector<Wave> waves;

  double intensity(double s, double t) const;
};

/// Bounded planar patch: centre + s·axis_u + t·axis_v with |s| <= half_u, |t| <= half_v.
struct TexturedRect {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
  double half_u = 1.0;
  double half_v = 1.0;
  Texture texture;

  Plane3D plane() const;
  /// Ray parameter of the hit with origin + t·dir, if any.
  std::optional<double> intersect(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const;
  std::vector<Eigen::Vector3d> corners() const;
};

struct Segment3D {
  int id = 0;
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
};

/// Image edge ids are scene segment id + kEdgePieceStride · piece, piece 0 being the longest
/// visible run of a segment that occlusion splits.
inline constexpr int kEdgePieceStride = 1000;

struct SyntheticScene {
  std::vector<TexturedRect> planes;
  std::vector<Segment3D> segments3d;
  std::uint64_t seed = 0;
  double background = 20.0;

  /// Accepts scene segment ids and image edge ids.
  const Segment3D& segment(int id) const;
};

/// Geometry and albedo of one rectangle before texture synthesis.
struct RectSpec {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
  double half_u = 1.0;
  double half_v = 1.0;
  double base = 128.0;
  double amplitude = 0.0;
  double wavelength = 0.4;  // shortest texture wavelength, scene units
};

/// Synthesises textures from the seed and derives one 3D segment per distinct rectangle border.
SyntheticScene build_scene(const std::vector<RectSpec>& rects, std::uint64_t seed, double background = 20.0);

/// Named scenes: "textured" (room with textured walls and a cabinet), "homogeneous" (same
/// geometry with near-uniform walls), "single_plane" (fronto-parallel plane at depth 2).
std::vector<RectSpec> scene_preset_rects(const std::string& name);
SyntheticScene scene_preset(const std::string& name, std::uint64_t seed);

/// 320x240, fx = fy = 300, principal point at the image centre.
CameraIntrinsics default_camera();

struct RenderedFrame {
  Image image;
  InverseDepthMap gt_depth;
  Pose gt_pose;  // camera to world
  std::vector<LineSegment2D> gt_edges;
  /// Edges as a detector would report them; equal to gt_edges until noise is applied.
  std::vector<LineSegment2D> edges;
  /// gt_depth with injected gross outliers, present when a depth outlier rate was applied.
  std::optional<InverseDepthMap> noisy_depth;
};

struct RenderOptions {
  int supersample = 2;
  double min_edge_length = 10.0;
};

/// Ray casts the scene from the camera-to-world pose. Throws EmptyView if no plane is hit.
RenderedFrame render(const SyntheticScene& scene, const CameraIntrinsics& K, const Pose& camera_to_world,
                     const RenderOptions& options = {});

struct NoiseSpec {
  double intensity_sigma = 0.0;
  double endpoint_sigma = 0.0;
  double depth_outlier_rate = 0.0;

  bool zero() const { return intensity_sigma == 0.0 && endpoint_sigma == 0.0 && depth_outlier_rate == 0.0; }
};

/// Gaussian intensity noise, endpoint jitter on the observed edges, gross depth outliers.
/// Ground-truth fields are never modified.
RenderedFrame apply_noise(const RenderedFrame& frame, const NoiseSpec& noise, std::uint64_t seed);

/// Inverse depth of the point on the scene segment seen through pixel x (closest approach of
/// the pixel ray and the 3D line).
double segment_inverse_depth(const SyntheticScene& scene, const CameraIntrinsics& K, const Pose& camera_to_world,
                             int segment_id, const PixelPoint& x);

enum class TrajectoryKind { Dolly, Arc, Orbit };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Dolly;
  // dolly
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  double length = 0.3;
  // arc and orbit: camera looks at `center` from `radius`, yaw sweeping about the y axis
  Eigen::Vector3d center = Eigen::Vector3d(0.0, 0.0, 4.0);
  double radius = 4.0;
  double start_angle = 0.0;
  double sweep = 0.2;
};

/// Camera-to-world poses; endpoints inclusive, so frame n-1 sits at the end of the path.
/// Throws InvalidArgument when n < 2.
std::vector<Pose> generate_trajectory(const TrajectorySpec& spec, int n_frames);

/// Rotation about the camera y axis.
Eigen::Matrix3d rotation_y(double angle);

/// Everything a run needs to synthesise a sequence.
struct SceneConfig {
  std::string name = "textured";
  SyntheticScene scene;
  CameraIntrinsics camera = default_camera();
  TrajectorySpec trajectory;
  int frames = 30;
  double fps = 30.0;
};

/// Preset name or path to a key = value scene file. Throws ParseError with a line number.
SceneConfig load_scene_config(const std::string& preset_or_path);
SceneConfig parse_scene_config(const std::string& text);
SceneConfig scene_config_preset(const std::string& name, std::uint64_t seed = 7);

}  // namespace edgevo
