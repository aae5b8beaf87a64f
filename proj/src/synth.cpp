#include "edgevo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "edgevo/error.hpp"
#include "edgevo/uncertainty.hpp"

namespace edgevo {

namespace {

constexpr int kWavesPerTexture = 4;
constexpr int kVisibilitySamples = 160;
constexpr double kNearPlane = 0.05;

struct Hit {
  double depth = std::numeric_limits<double>::infinity();  // camera Z
  std::size_t rect = 0;
  Eigen::Vector3d point;
};

// Nearest hit along a camera ray. `ray_cam` has z = 1 so the ray parameter equals camera Z.
std::optional<Hit> cast(const SyntheticScene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir_world) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < scene.planes.size(); ++i) {
    const auto t = scene.planes[i].intersect(origin, dir_world);
    if (t && (!best || *t < best->depth)) best = Hit{*t, i, origin + *t * dir_world};
  }
  return best;
}

double shade(const SyntheticScene& scene, const Hit& hit) {
  const auto& r = scene.planes[hit.rect];
  const Eigen::Vector3d local = hit.point - r.center;
  return r.texture.intensity(local.dot(r.axis_u), local.dot(r.axis_v));
}

bool same_segment(const Segment3D& s, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  constexpr double tol = 1e-9;
  return ((s.a - a).norm() < tol && (s.b - b).norm() < tol) || ((s.a - b).norm() < tol && (s.b - a).norm() < tol);
}

}  // namespace

double Texture::intensity(double s, double t) const {
  if (waves.empty() || amplitude == 0.0) return base;
  double sum = 0.0;
  for (const auto& w : waves) sum += std::sin(2.0 * std::numbers::pi * (w.frequency.x() * s + w.frequency.y() * t) + w.phase);
  return base + amplitude * sum / static_cast<double>(waves.size());
}

Plane3D TexturedRect::plane() const {
  const Eigen::Vector3d n = axis_u.cross(axis_v).normalized();
  return {n, -n.dot(center)};
}

std::optional<double> TexturedRect::intersect(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) const {
  const Eigen::Vector3d n = axis_u.cross(axis_v);
  const double denom = n.dot(dir);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = n.dot(center - origin) / denom;
  if (!(t > 1e-9)) return std::nullopt;
  const Eigen::Vector3d local = origin + t * dir - center;
  if (std::abs(local.dot(axis_u)) > half_u || std::abs(local.dot(axis_v)) > half_v) return std::nullopt;
  return t;
}

std::vector<Eigen::Vector3d> TexturedRect::corners() const {
  const Eigen::Vector3d du = half_u * axis_u;
  const Eigen::Vector3d dv = half_v * axis_v;
  return {center - du - dv, center + du - dv, center + du + dv, center - du + dv};
}

const Segment3D& SyntheticScene::segment(int id) const {
  const int base = id % kEdgePieceStride;
  for (const auto& s : segments3d)
    if (s.id == base) return s;
  throw Error(ErrorCode::InvalidElement, "unknown scene segment " + std::to_string(id));
}

SyntheticScene build_scene(const std::vector<RectSpec>& rects, std::uint64_t seed, double background) {
  SyntheticScene scene;
  scene.seed = seed;
  scene.background = background;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& spec : rects) {
    TexturedRect r;
    r.center = spec.center;
    r.axis_u = spec.axis_u.normalized();
    r.axis_v = spec.axis_v.normalized();
    r.half_u = spec.half_u;
    r.half_v = spec.half_v;
    r.texture.base = spec.base;
    r.texture.amplitude = spec.amplitude;
    for (int k = 0; k < kWavesPerTexture; ++k) {
      const double angle = std::numbers::pi * unit(rng);
      const double wavelength = spec.wavelength * (1.0 + unit(rng));
      Wave w;
      w.frequency = Eigen::Vector2d(std::cos(angle), std::sin(angle)) / wavelength;
      w.phase = 2.0 * std::numbers::pi * unit(rng);
      r.texture.waves.push_back(w);
    }
    scene.planes.push_back(r);

    const auto c = r.corners();
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector3d& a = c[static_cast<std::size_t>(k)];
      const Eigen::Vector3d& b = c[static_cast<std::size_t>((k + 1) % 4)];
      const bool known = std::any_of(scene.segments3d.begin(), scene.segments3d.end(),
                                     [&](const Segment3D& s) { return same_segment(s, a, b); });
      if (!known) scene.segments3d.push_back({static_cast<int>(scene.segments3d.size()) + 1, a, b});
    }
  }
  return scene;
}

std::vector<RectSpec> scene_preset_rects(const std::string& name) {
  const Eigen::Vector3d X = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d Y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d Z = Eigen::Vector3d::UnitZ();
  if (name == "single_plane") {
    return {{Eigen::Vector3d(0, 0, 2), X, Y, 3.0, 3.0, 128.0, 40.0, 0.25}};
  }
  double amp = 0.0;
  double wavelength = 0.5;
  if (name == "textured") {
    amp = 100.0;
  } else if (name == "homogeneous") {
    amp = 0.5;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scene preset '" + name + "'");
  }
  // Camera starts at the origin looking along +z with y pointing down; floor at y = 1.
  return {
      {Eigen::Vector3d(0.0, -0.1, 4.0), X, Y, 1.6, 1.1, 150.0, amp, wavelength},    // back wall
      {Eigen::Vector3d(0.0, 1.0, 2.0), X, Z, 1.6, 2.0, 95.0, amp, 3.0 * wavelength},  // floor, seen at grazing angles
      {Eigen::Vector3d(-1.6, -0.1, 2.0), Z, Y, 2.0, 1.1, 185.0, amp, wavelength},   // left wall
      {Eigen::Vector3d(1.6, -0.1, 2.0), Z, Y, 2.0, 1.1, 125.0, amp, wavelength},    // right wall
      {Eigen::Vector3d(-0.9, 0.0, 3.98), X, Y, 0.45, 0.6, 60.0, amp, wavelength},   // door
      {Eigen::Vector3d(0.4, 0.55, 2.6), X, Y, 0.5, 0.45, 215.0, amp, wavelength},   // cabinet front
      {Eigen::Vector3d(0.4, 0.1, 2.85), X, Z, 0.5, 0.25, 170.0, amp, 3.0 * wavelength},  // cabinet top
      {Eigen::Vector3d(-0.1, 0.55, 2.85), Z, Y, 0.25, 0.45, 80.0, amp, wavelength}, // cabinet side
  };
}

SyntheticScene scene_preset(const std::string& name, std::uint64_t seed) {
  return build_scene(scene_preset_rects(name), seed);
}

CameraIntrinsics default_camera() { return {300.0, 300.0, 159.5, 119.5, 320, 240}; }

RenderedFrame render(const SyntheticScene& scene, const CameraIntrinsics& K, const Pose& camera_to_world,
                     const RenderOptions& options) {
  K.validate();
  RenderedFrame frame;
  frame.gt_pose = camera_to_world;
  frame.image = Image(K.width, K.height, scene.background);
  frame.gt_depth = InverseDepthMap(K.width, K.height);

  const Eigen::Vector3d origin = camera_to_world.translation();
  const Eigen::Matrix3d& R = camera_to_world.rotation();
  const int ss = std::max(1, options.supersample);
  const double inv_ss2 = 1.0 / (ss * ss);
  bool any_hit = false;

  for (int y = 0; y < K.height; ++y) {
    for (int x = 0; x < K.width; ++x) {
      const Eigen::Vector3d center_ray = pixel_ray(K, {static_cast<double>(x), static_cast<double>(y)});
      if (const auto hit = cast(scene, origin, R * center_ray)) {
        frame.gt_depth.set(x, y, {1.0 / hit->depth, kVarianceFloor});
        any_hit = true;
      }
      double sum = 0.0;
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          const PixelPoint sub{x + (sx + 0.5) / ss - 0.5, y + (sy + 0.5) / ss - 0.5};
          const auto hit = cast(scene, origin, R * pixel_ray(K, sub));
          sum += hit ? shade(scene, *hit) : scene.background;
        }
      }
      frame.image.at(x, y) = sum * inv_ss2;
    }
  }
  if (!any_hit) throw Error(ErrorCode::EmptyView, "camera sees no plane");

  const Pose world_to_camera = camera_to_world.inverse();
  const auto visible = [&](const Eigen::Vector3d& Pw) {
    const Eigen::Vector3d Pc = world_to_camera * Pw;
    if (Pc.z() < kNearPlane) return false;
    const PixelPoint px = project(K, Pc);
    if (!K.contains(px)) return false;
    const auto hit = cast(scene, origin, R * (Pc / Pc.z()));
    return !hit || hit->depth >= Pc.z() * (1.0 - 1e-6) - 1e-9;
  };

  for (const auto& seg : scene.segments3d) {
    const auto point_at = [&](double s) -> Eigen::Vector3d { return seg.a + s * (seg.b - seg.a); };
    // Runs of visible samples, each refined at both ends by bisection.
    std::vector<std::pair<int, int>> runs;  // first sample, sample count
    int run_start = -1;
    for (int i = 0; i <= kVisibilitySamples; ++i) {
      const bool vis = visible(point_at(static_cast<double>(i) / kVisibilitySamples));
      if (vis && run_start < 0) run_start = i;
      if ((!vis || i == kVisibilitySamples) && run_start >= 0) {
        const int end = vis ? i : i - 1;
        if (end - run_start + 1 >= 2) runs.emplace_back(run_start, end - run_start + 1);
        run_start = -1;
      }
    }
    std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    const auto refine = [&](double inside, double outside) {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (inside + outside);
        (visible(point_at(mid)) ? inside : outside) = mid;
      }
      return inside;
    };
    int piece = 0;
    for (const auto& [start, len] : runs) {
      double s0 = static_cast<double>(start) / kVisibilitySamples;
      double s1 = static_cast<double>(start + len - 1) / kVisibilitySamples;
      if (start > 0) s0 = refine(s0, static_cast<double>(start - 1) / kVisibilitySamples);
      if (start + len - 1 < kVisibilitySamples) s1 = refine(s1, static_cast<double>(start + len) / kVisibilitySamples);
      const PixelPoint p1 = project(K, world_to_camera * point_at(s0));
      const PixelPoint p2 = project(K, world_to_camera * point_at(s1));
      if ((p2.vec() - p1.vec()).norm() < options.min_edge_length) continue;
      frame.gt_edges.push_back(LineSegment2D::make(seg.id + kEdgePieceStride * piece++, p1, p2, 0));
    }
  }
  frame.edges = frame.gt_edges;
  return frame;
}

RenderedFrame apply_noise(const RenderedFrame& frame, const NoiseSpec& noise, std::uint64_t seed) {
  if (noise.intensity_sigma < 0.0 || noise.endpoint_sigma < 0.0 || noise.depth_outlier_rate < 0.0)
    throw Error(ErrorCode::InvalidArgument, "noise levels must be non-negative");
  RenderedFrame out = frame;
  if (noise.zero()) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  if (noise.intensity_sigma > 0.0)
    for (double& v : out.image.data()) v += noise.intensity_sigma * gauss(rng);

  if (noise.endpoint_sigma > 0.0) {
    std::vector<LineSegment2D> jittered;
    for (const auto& e : frame.edges) {
      const PixelPoint p1{e.p1.u + noise.endpoint_sigma * gauss(rng), e.p1.v + noise.endpoint_sigma * gauss(rng)};
      const PixelPoint p2{e.p2.u + noise.endpoint_sigma * gauss(rng), e.p2.v + noise.endpoint_sigma * gauss(rng)};
      try {
        jittered.push_back(LineSegment2D::make(e.id, p1, p2, e.pyramid_level));
      } catch (const Error&) {
      }
    }
    out.edges = std::move(jittered);
  }

  if (noise.depth_outlier_rate > 0.0) {
    InverseDepthMap noisy = frame.gt_depth;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& p : frame.gt_depth.defined_pixels()) {
      if (unit(rng) >= noise.depth_outlier_rate) continue;
      auto h = *frame.gt_depth.get(p.x, p.y);
      h.mean *= 0.5 + 1.5 * unit(rng);
      noisy.set(p.x, p.y, h);
    }
    out.noisy_depth = std::move(noisy);
  }
  return out;
}

double segment_inverse_depth(const SyntheticScene& scene, const CameraIntrinsics& K, const Pose& camera_to_world,
                             int segment_id, const PixelPoint& x) {
  const auto& seg = scene.segment(segment_id);
  const Pose w2c = camera_to_world.inverse();
  const Line3D line = Line3D::through(w2c * seg.a, w2c * seg.b);
  // Closest approach between the ray s·r and the line p + t·d, measured along the ray.
  const Eigen::Vector3d r = pixel_ray(K, x);
  const Eigen::Vector3d& d = line.direction;
  const Eigen::Vector3d& p = line.point;
  const double a = r.dot(r), b = r.dot(d), c = d.dot(d), e = r.dot(p), f = d.dot(p);
  const double denom = a * c - b * b;
  if (std::abs(denom) < 1e-14) throw Error(ErrorCode::DegenerateTriangulation, "ray parallel to segment");
  const double s = (c * e - b * f) / denom;  // ray parameter, equal to the depth since r.z = 1
  if (!(s > 0.0)) throw Error(ErrorCode::BehindCamera, "segment behind camera");
  return 1.0 / s;
}

Eigen::Matrix3d rotation_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d R;
  R << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return R;
}

std::vector<Pose> generate_trajectory(const TrajectorySpec& spec, int n_frames) {
  if (n_frames < 2) throw Error(ErrorCode::InvalidArgument, "trajectory needs at least two frames");
  std::vector<Pose> poses;
  poses.reserve(static_cast<std::size_t>(n_frames));
  for (int i = 0; i < n_frames; ++i) {
    const double f = static_cast<double>(i) / (n_frames - 1);
    switch (spec.kind) {
      case TrajectoryKind::Dolly:
        poses.emplace_back(Eigen::Matrix3d::Identity(), spec.start + f * spec.length * spec.direction.normalized());
        break;
      case TrajectoryKind::Arc:
      case TrajectoryKind::Orbit: {
        const double angle = spec.start_angle + f * spec.sweep;
        const Eigen::Matrix3d R = rotation_y(angle);
        poses.emplace_back(R, spec.center - spec.radius * (R * Eigen::Vector3d::UnitZ()));
        break;
      }
    }
  }
  return poses;
}

namespace {

std::vector<double> numbers(std::istringstream& ss) {
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw Error(ErrorCode::ParseError, "expected a number, got '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

SceneConfig scene_config_preset(const std::string& name, std::uint64_t seed) {
  SceneConfig cfg;
  cfg.name = name;
  cfg.scene = scene_preset(name, seed);
  cfg.trajectory.kind = TrajectoryKind::Dolly;
  cfg.trajectory.direction = Eigen::Vector3d::UnitZ();
  cfg.trajectory.length = 0.3;
  return cfg;
}

SceneConfig parse_scene_config(const std::string& text) {
  SceneConfig cfg;
  std::string preset = "textured";
  std::uint64_t seed = 7;
  double background = 20.0;
  std::vector<RectSpec> rects;
  bool have_trajectory = false;
  TrajectorySpec trajectory;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = " at line " + std::to_string(line_no);
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected key = value" + where);
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream value(line.substr(eq + 1));
    try {
      if (key == "preset" || key == "name") {
        std::string v;
        value >> v;
        (key == "preset" ? preset : cfg.name) = v;
      } else if (key == "trajectory") {
        std::string kind;
        value >> kind;
        const auto v = numbers(value);
        have_trajectory = true;
        if (kind == "dolly") {
          if (v.size() != 7) throw Error(ErrorCode::ParseError, "dolly needs start(3) direction(3) length");
          trajectory.kind = TrajectoryKind::Dolly;
          trajectory.start = {v[0], v[1], v[2]};
          trajectory.direction = {v[3], v[4], v[5]};
          trajectory.length = v[6];
        } else if (kind == "arc" || kind == "orbit") {
          if (v.size() != 6) throw Error(ErrorCode::ParseError, kind + " needs center(3) radius start_deg sweep_deg");
          trajectory.kind = kind == "arc" ? TrajectoryKind::Arc : TrajectoryKind::Orbit;
          trajectory.center = {v[0], v[1], v[2]};
          trajectory.radius = v[3];
          trajectory.start_angle = v[4] * std::numbers::pi / 180.0;
          trajectory.sweep = v[5] * std::numbers::pi / 180.0;
        } else {
          throw Error(ErrorCode::ParseError, "unknown trajectory kind '" + kind + "'");
        }
      } else if (key == "rect") {
        const auto v = numbers(value);
        if (v.size() != 14) throw Error(ErrorCode::ParseError, "rect needs 14 numbers");
        RectSpec r;
        r.center = {v[0], v[1], v[2]};
        r.axis_u = {v[3], v[4], v[5]};
        r.axis_v = {v[6], v[7], v[8]};
        r.half_u = v[9];
        r.half_v = v[10];
        r.base = v[11];
        r.amplitude = v[12];
        r.wavelength = v[13];
        rects.push_back(r);
      } else {
        const auto v = numbers(value);
        const auto scalar = [&]() {
          if (v.size() != 1) throw Error(ErrorCode::ParseError, key + " takes one value");
          return v[0];
        };
        if (key == "seed") {
          seed = static_cast<std::uint64_t>(scalar());
        } else if (key == "frames") {
          cfg.frames = static_cast<int>(scalar());
        } else if (key == "fps") {
          cfg.fps = scalar();
        } else if (key == "background") {
          background = scalar();
        } else if (key == "camera") {
          if (v.size() != 6) throw Error(ErrorCode::ParseError, "camera needs fx fy cx cy width height");
          cfg.camera = {v[0], v[1], v[2], v[3], static_cast<int>(v[4]), static_cast<int>(v[5])};
        } else {
          throw Error(ErrorCode::ParseError, "unknown key '" + key + "'");
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError && std::string(e.what()).find(" at line ") == std::string::npos)
        throw Error(ErrorCode::ParseError, std::string(e.what()).substr(12) + where);
      throw;
    }
  }

  std::vector<RectSpec> all = preset == "none" ? std::vector<RectSpec>{} : scene_preset_rects(preset);
  all.insert(all.end(), rects.begin(), rects.end());
  if (all.empty()) throw Error(ErrorCode::ParseError, "scene has no planes");
  if (cfg.name.empty() || cfg.name == "textured") cfg.name = preset;
  cfg.scene = build_scene(all, seed, background);
  if (have_trajectory) cfg.trajectory = trajectory;
  if (cfg.frames < 2) throw Error(ErrorCode::ParseError, "frames must be at least 2");
  if (!(cfg.fps > 0.0)) throw Error(ErrorCode::ParseError, "fps must be positive");
  cfg.camera.validate();
  return cfg;
}

SceneConfig load_scene_config(const std::string& preset_or_path) {
  for (const char* name : {"textured", "homogeneous", "single_plane"})
    if (preset_or_path == name) return scene_config_preset(name);
  std::ifstream in(preset_or_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene file " + preset_or_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_config(ss.str());
}

}  // namespace edgevo
