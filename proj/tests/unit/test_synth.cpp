#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <set>

#include "edgevo/error.hpp"
#include "edgevo/synth.hpp"

using namespace edgevo;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

double distance_to_segment(const LineSegment2D& e, const PixelPoint& x) {
  const Eigen::Vector2d d = e.p2.vec() - e.p1.vec();
  const double t = std::clamp((x.vec() - e.p1.vec()).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x.vec() - e.p1.vec() - t * d).norm();
}

// Undefined depth samples are NaN, so compare representations.
bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const SyntheticScene& textured() {
  static const SyntheticScene s = scene_preset("textured", 7);
  return s;
}

}  // namespace

TEST(Render, FrontoParallelPlaneHasUniformInverseDepth) {
  const auto scene = scene_preset("single_plane", 3);
  const auto f = render(scene, default_camera(), Pose::identity());
  ASSERT_EQ(f.gt_depth.defined_count(), std::size_t(320 * 240));
  for (const auto& p : f.gt_depth.defined_pixels()) ASSERT_NEAR(f.gt_depth.get(p.x, p.y)->mean, 0.5, 1e-12);
}

TEST(Render, EdgeEndpointsAreProjectedSegmentEndpoints) {
  const auto K = default_camera();
  const Pose pose(rotation_y(0.05), Eigen::Vector3d(0.05, -0.02, 0.1));
  const auto f = render(textured(), K, pose);
  ASSERT_GE(f.gt_edges.size(), 8u);
  const Pose w2c = pose.inverse();
  int exact = 0;
  for (const auto& e : f.gt_edges) {
    const auto& seg = textured().segment(e.id);
    const Eigen::Vector3d a = w2c * seg.a, b = w2c * seg.b;
    const Eigen::Vector3d dir = (b - a).normalized();
    // Each endpoint is the projection of a point on the 3D segment: its ray meets the 3D line.
    for (const PixelPoint& p : {e.p1, e.p2}) {
      const Eigen::Vector3d r = pixel_ray(K, p).normalized();
      const Eigen::Vector3d n = r.cross(dir);
      EXPECT_LT(std::abs(a.dot(n)) / n.norm(), 1e-9);
    }
    // Segments fully in view end exactly at the projected endpoints.
    if (e.id >= kEdgePieceStride || a.z() <= 0.0 || b.z() <= 0.0) continue;
    const auto pa = project(K, a), pb = project(K, b);
    if (!K.contains(pa) || !K.contains(pb)) continue;
    const double d = std::min((e.p1.vec() - pa.vec()).norm() + (e.p2.vec() - pb.vec()).norm(),
                              (e.p1.vec() - pb.vec()).norm() + (e.p2.vec() - pa.vec()).norm());
    if (d < 1e-3) {
      EXPECT_LT(d, 1e-9);
      ++exact;
    }
  }
  EXPECT_GT(exact, 0);
}

TEST(Render, EdgeIdsUnique) {
  const auto f = render(textured(), default_camera(), Pose::identity());
  std::set<int> ids;
  for (const auto& e : f.gt_edges) EXPECT_TRUE(ids.insert(e.id).second);
}

TEST(Render, EdgePixelsWithinHalfDiagonalOfLine) {
  const auto f = render(textured(), default_camera(), Pose(rotation_y(0.04), Eigen::Vector3d(0.02, 0.0, 0.1)));
  for (const auto& e : f.gt_edges) {
    const auto pixels = trace_pixels(e, 0);
    ASSERT_GE(double(pixels.size()), std::max(std::abs(e.p2.u - e.p1.u), std::abs(e.p2.v - e.p1.v)));
    for (const auto& px : pixels) EXPECT_LE(std::abs(point_line_signed_distance(e.line, px.point())), 0.71);
  }
}

TEST(Render, CrossViewPhotometricConsistency) {
  const auto K = default_camera();
  const auto poses = generate_trajectory(scene_config_preset("textured").trajectory, 30);
  const Pose a = poses[3], b = Pose(rotation_y(0.02), Eigen::Vector3d(0.03, 0.01, 0.0)) * poses[9];
  const auto fa = render(textured(), K, a), fb = render(textured(), K, b);
  const Pose a_to_b = b.inverse() * a;
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> ux(3, K.width - 4), uy(3, K.height - 4);
  int checked = 0;
  double worst = 0.0;
  while (checked < 1000) {
    const int x = ux(rng), y = uy(rng);
    const double d = fa.gt_depth.get(x, y)->mean;
    // Skip pixels whose neighbourhood crosses a depth discontinuity or a plane boundary.
    bool smooth = true;
    for (int dy = -2; dy <= 2 && smooth; ++dy)
      for (int dx = -2; dx <= 2 && smooth; ++dx)
        smooth = std::abs(fa.gt_depth.get(x + dx, y + dy)->mean - d) < 0.02 * d;
    if (!smooth) continue;
    bool near_edge = false;
    for (const auto& e : fa.gt_edges)
      near_edge |= distance_to_segment(e, PixelPoint{double(x), double(y)}) < 3.0;
    if (near_edge) continue;
    const PixelPoint w = warp(K, {double(x), double(y)}, d, a_to_b);
    if (w.u < 3 || w.v < 3 || w.u > K.width - 4 || w.v > K.height - 4) continue;
    // Occluded in b: the warped point is behind what b sees.
    const double zb = (a_to_b * backproject(K, {double(x), double(y)}, d)).z();
    const double db = fb.gt_depth.get(int(std::round(w.u)), int(std::round(w.v)))->mean;
    if (std::abs(1.0 / zb - db) > 0.02 * db) continue;
    worst = std::max(worst, std::abs(*fb.image.sample(w.u, w.v) - fa.image.at(x, y)));
    ++checked;
  }
  EXPECT_LT(worst, 3.0);
}

TEST(Render, EmptyView) {
  const auto scene = scene_preset("single_plane", 3);
  const Pose away(rotation_y(std::numbers::pi), Eigen::Vector3d::Zero());
  EXPECT_EQ(code_of([&] { render(scene, default_camera(), away); }), ErrorCode::EmptyView);
}

TEST(Render, Deterministic) {
  const Pose pose(rotation_y(0.03), Eigen::Vector3d(0.01, 0.0, 0.05));
  const auto f1 = render(scene_preset("textured", 11), default_camera(), pose);
  const auto f2 = render(scene_preset("textured", 11), default_camera(), pose);
  EXPECT_EQ(f1.image, f2.image);
  EXPECT_TRUE(same_bits(f1.gt_depth.means(), f2.gt_depth.means()));
  ASSERT_EQ(f1.gt_edges.size(), f2.gt_edges.size());
  for (std::size_t i = 0; i < f1.gt_edges.size(); ++i) {
    EXPECT_EQ(f1.gt_edges[i].id, f2.gt_edges[i].id);
    EXPECT_EQ(f1.gt_edges[i].p1.vec(), f2.gt_edges[i].p1.vec());
  }
  const auto other = render(scene_preset("textured", 12), default_camera(), pose);
  EXPECT_NE(f1.image, other.image);
}

TEST(Render, SegmentInverseDepthMatchesLineOnEdge) {
  const auto K = default_camera();
  const auto f = render(textured(), K, Pose::identity());
  for (const auto& e : f.gt_edges) {
    const auto& seg = textured().segment(e.id);
    const auto mid = PixelPoint{0.5 * (e.p1.u + e.p2.u), 0.5 * (e.p1.v + e.p2.v)};
    const double rho = segment_inverse_depth(textured(), K, Pose::identity(), e.id, mid);
    const Eigen::Vector3d X = backproject(K, mid, rho);
    // X lies on the 3D segment line.
    const Eigen::Vector3d d = (seg.b - seg.a).normalized();
    EXPECT_LT(((X - seg.a) - d * d.dot(X - seg.a)).norm(), 1e-9);
  }
}

TEST(Trajectory, DollySteps) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::Dolly;
  s.length = 1.0;
  const auto p = generate_trajectory(s, 11);
  ASSERT_EQ(p.size(), 11u);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const Pose rel = p[i - 1].inverse() * p[i];
    EXPECT_NEAR(rel.translation().norm(), 0.1, 1e-12);
    EXPECT_NEAR(rel.rotation_angle(), 0.0, 1e-12);
  }
}

TEST(Trajectory, FullOrbitCloses) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::Orbit;
  s.sweep = 2.0 * std::numbers::pi;
  const auto p = generate_trajectory(s, 37);
  EXPECT_LT((p.back().translation() - p.front().translation()).norm(), 1e-9);
}

TEST(Trajectory, ArcMatchesClosedForm) {
  TrajectorySpec s;
  s.kind = TrajectoryKind::Arc;
  s.center = {0.1, -0.2, 3.0};
  s.radius = 2.5;
  s.start_angle = -0.1;
  s.sweep = 0.3;
  const int n = 7;
  const auto p = generate_trajectory(s, n);
  const double step = s.sweep / (n - 1);
  // Consecutive relative pose: yaw by `step`, translation radius·(−sin step, 0, 1 − cos step).
  const Eigen::Vector3d t(-s.radius * std::sin(step), 0.0, s.radius * (1.0 - std::cos(step)));
  for (int i = 1; i < n; ++i) {
    const Pose rel = p[i - 1].inverse() * p[i];
    EXPECT_LT((rel.rotation() - rotation_y(step)).norm(), 1e-12);
    EXPECT_LT((rel.translation() - t).norm(), 1e-12);
  }
}

TEST(Trajectory, NeedsTwoFrames) {
  EXPECT_EQ(code_of([] { generate_trajectory({}, 1); }), ErrorCode::InvalidArgument);
}

TEST(Noise, ZeroSpecIsIdentity) {
  const auto f = render(textured(), default_camera(), Pose::identity());
  const auto n = apply_noise(f, {}, 5);
  EXPECT_EQ(n.image, f.image);
  EXPECT_FALSE(n.noisy_depth.has_value());
  EXPECT_EQ(n.edges.size(), f.edges.size());
}

TEST(Noise, IntensityAndEndpointStatistics) {
  const auto f = render(textured(), default_camera(), Pose::identity());
  const auto n = apply_noise(f, {5.0, 1.0, 0.0}, 9);
  double s2 = 0.0;
  const auto& a = f.image.data();
  const auto& b = n.image.data();
  for (std::size_t i = 0; i < a.size(); ++i) s2 += (b[i] - a[i]) * (b[i] - a[i]);
  ASSERT_GE(a.size(), 76800u);
  const double sd = std::sqrt(s2 / a.size());
  EXPECT_GE(sd, 4.8);
  EXPECT_LE(sd, 5.2);
  EXPECT_EQ(n.gt_edges.size(), f.gt_edges.size());
  EXPECT_TRUE(same_bits(n.gt_depth.means(), f.gt_depth.means()));

  // Endpoint jitter pooled over many seeds.
  double ex = 0.0, ey = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto j = apply_noise(f, {0.0, 1.0, 0.0}, seed);
    ASSERT_EQ(j.edges.size(), f.edges.size());
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      ex += std::pow(j.edges[i].p1.u - f.edges[i].p1.u, 2) + std::pow(j.edges[i].p2.u - f.edges[i].p2.u, 2);
      ey += std::pow(j.edges[i].p1.v - f.edges[i].p1.v, 2) + std::pow(j.edges[i].p2.v - f.edges[i].p2.v, 2);
      count += 2;
    }
  }
  EXPECT_NEAR(std::sqrt(ex / count), 1.0, 0.05);
  EXPECT_NEAR(std::sqrt(ey / count), 1.0, 0.05);
}

TEST(Noise, DeterministicPerSeedAndOutliersOnlyInNoisyDepth) {
  const auto f = render(textured(), default_camera(), Pose::identity());
  const NoiseSpec spec{2.0, 0.5, 0.1};
  const auto a = apply_noise(f, spec, 1), b = apply_noise(f, spec, 1), c = apply_noise(f, spec, 2);
  EXPECT_EQ(a.image, b.image);
  EXPECT_NE(a.image, c.image);
  ASSERT_TRUE(a.noisy_depth.has_value());
  std::size_t changed = 0;
  for (const auto& p : f.gt_depth.defined_pixels())
    if (a.noisy_depth->get(p.x, p.y)->mean != f.gt_depth.get(p.x, p.y)->mean) ++changed;
  const double rate = double(changed) / f.gt_depth.defined_count();
  EXPECT_NEAR(rate, 0.1, 0.01);
  EXPECT_EQ(code_of([&] { apply_noise(f, {-1.0, 0.0, 0.0}, 1); }), ErrorCode::InvalidArgument);
}

TEST(SceneConfig, ParsesKeysAndTrajectory) {
  const auto cfg = parse_scene_config(
      "# small scene\n"
      "preset = none\n"
      "seed = 4\n"
      "frames = 12   # short\n"
      "fps = 15\n"
      "rect = 0 0 3  1 0 0  0 1 0  2 2  128 30 0.3\n"
      "trajectory = arc 0 0 3 3 -5 10\n");
  EXPECT_EQ(cfg.frames, 12);
  EXPECT_DOUBLE_EQ(cfg.fps, 15.0);
  EXPECT_EQ(cfg.scene.planes.size(), 1u);
  EXPECT_EQ(cfg.scene.segments3d.size(), 4u);
  EXPECT_EQ(cfg.trajectory.kind, TrajectoryKind::Arc);
  EXPECT_NEAR(cfg.trajectory.sweep, 10.0 * std::numbers::pi / 180.0, 1e-15);
}

TEST(SceneConfig, ErrorsNameTheLine) {
  const auto line_of = [](const std::string& text) -> std::string {
    try {
      parse_scene_config(text);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError);
      return e.what();
    }
    return "";
  };
  EXPECT_NE(line_of("seed = 1\nframes\n").find("line 2"), std::string::npos);
  EXPECT_NE(line_of("\n\nbogus = 3\n").find("line 3"), std::string::npos);
  EXPECT_NE(line_of("rect = 1 2 3\n").find("line 1"), std::string::npos);
  EXPECT_NE(line_of("fps = x\n").find("line 1"), std::string::npos);
  EXPECT_NE(line_of("trajectory = spiral 1 2\n").find("line 1"), std::string::npos);
  EXPECT_EQ(code_of([] { parse_scene_config("preset = none\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { load_scene_config("/nonexistent/scene.cfg"); }), ErrorCode::IoError);
}

TEST(SceneConfig, PresetsLoadByName) {
  for (const char* name : {"textured", "homogeneous", "single_plane"}) {
    const auto cfg = load_scene_config(name);
    EXPECT_EQ(cfg.name, name);
    EXPECT_FALSE(cfg.scene.planes.empty());
  }
}
