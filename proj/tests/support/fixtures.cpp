#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <unordered_map>

#include "edgevo/error.hpp"

namespace edgevo::testing {

KeyframeState keyframe_from_render(const SyntheticScene& scene, const CameraIntrinsics& K, const RenderedFrame& frame,
                                   double variance, const KeyframeOptions& options) {
  InverseDepthMap depth = frame.gt_depth;
  for (const auto& p : depth.defined_pixels()) depth.set(p.x, p.y, {depth.get(p.x, p.y)->mean, variance});
  const auto& edges = frame.edges;
  return make_keyframe(
      K, frame.gt_pose, frame.image, depth, edges,
      [&](std::size_t k, const PixelPoint& x) -> std::optional<DepthHypothesis> {
        return DepthHypothesis{segment_inverse_depth(scene, K, frame.gt_pose, edges[k].id, x), variance};
      },
      options);
}

PairFixture make_pair(const std::string& preset, int ref_frame, int cur_frame, int frames, double variance) {
  PairFixture p;
  p.scene = scene_preset(preset, 7);
  p.K = default_camera();
  p.poses = generate_trajectory(scene_config_preset(preset).trajectory, frames);
  p.ref = render(p.scene, p.K, p.poses.at(ref_frame));
  p.cur = render(p.scene, p.K, p.poses.at(cur_frame));
  p.kf = keyframe_from_render(p.scene, p.K, p.ref, variance);
  p.matches = match_edges(p.ref.edges, p.cur.edges, MatchMode::GroundTruth);
  p.gt = p.poses[cur_frame].inverse() * p.poses[ref_frame];
  p.mean_depth = 1.0 / p.kf.depth.mean_inverse_depth();
  return p;
}

const PairFixture& shared_pair(const std::string& preset, int ref_frame, int cur_frame) {
  static std::mutex mu;
  static std::map<std::tuple<std::string, int, int>, PairFixture> cache;
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(preset, ref_frame, cur_frame);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_pair(preset, ref_frame, cur_frame)).first;
  return it->second;
}

namespace {

Image downsample_times(const Image& img, int levels) {
  Image out = img;
  for (int i = 0; i < levels; ++i) out = out.downsample();
  return out;
}

double near_gridline(double a) { return std::abs(a - std::round(a)); }

}  // namespace

JacobianCheck check_jacobian(const KeyframeState& kf, int level, const Image& cur_full,
                             const std::vector<LineSegment2D>& cur_edges, const std::vector<EdgeMatch>& matches,
                             const Pose& T, TrackerConfig config, double step, double floor) {
  config.pyramid_levels = level + 1;
  const TrackingLevel lv = make_level(kf, level, config);
  const Image cur = downsample_times(cur_full, level);
  const ResidualSystem sys = build_system(lv, cur, cur_edges, matches, T, config);

  const auto perturbed = [&](int k, double h) {
    Vector6d d = Vector6d::Zero();
    d[k] = h;
    return exp_map(Twist::from_vector(d)) * T;
  };
  // Pixel motion bound of the stencil, so rows near a kink of the interpolant can be skipped.
  const double margin = 2e-3;

  JacobianCheck out;
  const auto compare = [&](int row, const Vector6d& fd) {
    const Vector6d an = sys.jacobian.row(row).transpose();
    const double rel = (an - fd).lpNorm<Eigen::Infinity>() / std::max(fd.lpNorm<Eigen::Infinity>(), floor);
    out.max_relative_error = std::max(out.max_relative_error, rel);
  };

  int row = 0;
  if (config.photometric_weight > 0.0) {
    for (const auto& s : lv.photometric) {
      const auto r0 = photometric_residual(lv.K, lv.ref, cur, s.x, s.inverse_depth, T);
      if (!r0) continue;
      const PixelPoint xw = warp(lv.K, s.x, s.inverse_depth, T);
      bool usable = near_gridline(xw.u) > margin && near_gridline(xw.v) > margin;
      Vector6d fd;
      for (int k = 0; k < 6 && usable; ++k) {
        const auto rp = photometric_residual(lv.K, lv.ref, cur, s.x, s.inverse_depth, perturbed(k, step));
        const auto rm = photometric_residual(lv.K, lv.ref, cur, s.x, s.inverse_depth, perturbed(k, -step));
        if (!rp || !rm) usable = false;
        else fd[k] = (*rp - *rm) / (2.0 * step);
      }
      if (std::abs(*r0 - sys.residuals[row]) > 1e-9) throw Error(ErrorCode::InvalidArgument, "row order mismatch");
      if (usable) {
        compare(row, fd);
        ++out.photometric_rows;
      } else {
        ++out.skipped;
      }
      ++row;
    }
  }
  if (config.geometric_weight > 0.0) {
    std::unordered_map<int, HomogeneousLine2D> targets;
    for (const auto& m : matches)
      for (const auto& e : cur_edges)
        if (e.id == m.cur_id) targets[m.ref_id] = line_to_level(e.line, level);
    for (const auto& s : lv.edges) {
      const auto it = targets.find(s.ref_id);
      if (it == targets.end()) continue;
      const auto g0 = geometric_residual(lv.K, it->second, s.x, s.depth.mean, T);
      if (!g0) continue;
      Vector6d fd;
      for (int k = 0; k < 6; ++k)
        fd[k] = (*geometric_residual(lv.K, it->second, s.x, s.depth.mean, perturbed(k, step)) -
                 *geometric_residual(lv.K, it->second, s.x, s.depth.mean, perturbed(k, -step))) /
                (2.0 * step);
      if (std::abs(*g0 - sys.residuals[row]) > 1e-9) throw Error(ErrorCode::InvalidArgument, "row order mismatch");
      compare(row, fd);
      ++out.geometric_rows;
      ++row;
    }
  }
  if (row != sys.rows()) throw Error(ErrorCode::InvalidArgument, "row count mismatch");
  return out;
}

Recovery recover(const PairFixture& pair, const Pose& init, const TrackerConfig& config) {
  Recovery r;
  try {
    const auto res = track_frame(pair.kf, pair.cur.image, pair.cur.edges, pair.matches, log_map(init), config);
    const Pose err = res.ref_to_cur * pair.gt.inverse();
    r.converged = true;
    r.rotation_deg = err.rotation_angle() * 180.0 / std::numbers::pi;
    r.translation = (res.ref_to_cur.translation() - pair.gt.translation()).norm();
  } catch (const Error&) {
    r.converged = false;
  }
  return r;
}

double basin_limit(const PairFixture& pair, const TrackerConfig& config, double max_deg, double step_deg,
                   double rotation_tol_deg, double translation_tol) {
  const Eigen::Vector3d axes[] = {Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ(),
                                  Eigen::Vector3d(1, 1, 1).normalized()};
  double limit = 0.0;
  for (double deg = step_deg; deg <= max_deg + 1e-9; deg += step_deg) {
    for (const auto& axis : axes) {
      for (const double sign : {1.0, -1.0}) {
        const Pose init = exp_map(Twist{Eigen::Vector3d::Zero(), sign * axis * deg * std::numbers::pi / 180.0}) * pair.gt;
        const Recovery r = recover(pair, init, config);
        if (!r.converged || r.rotation_deg > rotation_tol_deg || r.translation > translation_tol) return limit;
      }
    }
    limit = deg;
  }
  return limit;
}

}  // namespace edgevo::testing
