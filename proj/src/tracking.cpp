#include "edgevo/tracking.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "edgevo/error.hpp"

namespace edgevo {

namespace {

constexpr double kMinDepthZ = 1e-9;
constexpr double kMaxCondition = 1e12;

Matrix36d point_jacobian(const Eigen::Vector3d& Xc) {
  Matrix36d J;
  J.leftCols<3>().setIdentity();
  J.rightCols<3>() = -hat(Xc);
  return J;
}

Image downsample_times(const Image& img, int levels) {
  Image out = img;
  for (int i = 0; i < levels; ++i) out = out.downsample();
  return out;
}

struct Row {
  double r;
  Vector6d j;
  double w;
};

class RowSink {
 public:
  explicit RowSink(std::optional<double> huber) : huber_(huber) {}

  void add(double r, const Vector6d& j, double w) {
    if (huber_) {
      const double e = std::abs(r) * std::sqrt(w);
      if (e > *huber_) w *= *huber_ / e;
    }
    rows_.push_back({r, j, w});
  }
  std::size_t size() const { return rows_.size(); }

  void fill(ResidualSystem& sys) const {
    const auto n = static_cast<Eigen::Index>(rows_.size());
    sys.residuals.resize(n);
    sys.jacobian.resize(n, 6);
    sys.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows_[static_cast<std::size_t>(i)];
      sys.residuals[i] = row.r;
      sys.jacobian.row(i) = row.j.transpose();
      sys.weights[i] = row.w;
    }
  }

 private:
  std::optional<double> huber_;
  std::vector<Row> rows_;
};

void rethrow_with_level(const Error& e, int level) {
  std::string msg = e.what();
  const auto colon = msg.find(": ");
  if (colon != std::string::npos) msg = msg.substr(colon + 2);
  throw Error(e.code(), "level " + std::to_string(level) + ": " + msg);
}

}  // namespace

PixelPoint KeyframeState::edge_point(std::size_t k, std::size_t j) const {
  return edges[k].line.closest_point(edges[k].pixels[j].point());
}

int KeyframeState::edge_index(int id) const {
  for (std::size_t k = 0; k < edges.size(); ++k)
    if (edges[k].id == id) return static_cast<int>(k);
  return -1;
}

KeyframeState make_keyframe(const CameraIntrinsics& K, const Pose& pose, const Image& image,
                            const InverseDepthMap& depth, const std::vector<LineSegment2D>& edges,
                            const std::function<std::optional<DepthHypothesis>(std::size_t, const PixelPoint&)>& edge_depth,
                            const KeyframeOptions& options) {
  K.validate();
  if (image.width() != K.width || image.height() != K.height || depth.width() != K.width ||
      depth.height() != K.height)
    throw Error(ErrorCode::InvalidArgument, "keyframe image, depth and intrinsics disagree in size");

  KeyframeState kf;
  kf.K = K;
  kf.pose = pose;
  kf.image = image;
  kf.depth = InverseDepthMap(K.width, K.height);

  std::set<PixelIndex> edge_pixels;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    LineSegment2D e = with_traced_pixels(edges[k], options.edge_expand, K.width, K.height);
    std::vector<PixelIndex> kept;
    std::vector<DepthHypothesis> depths;
    for (const auto& p : e.pixels) {
      const PixelPoint foot = e.line.closest_point(p.point());
      std::optional<DepthHypothesis> h;
      try {
        h = edge_depth(kf.edges.size(), foot);
      } catch (const Error&) {
        h.reset();
      }
      const auto own = depth.get(p.x, p.y);
      if (!own || !h || !(h->mean > 0.0) || !(h->variance > 0.0)) continue;
      kept.push_back(p);
      depths.push_back(*h);
      kf.depth.set(p.x, p.y, *own);
      edge_pixels.insert(p);
    }
    e.pixels = std::move(kept);
    kf.edges.push_back(std::move(e));
    kf.edge_depths.push_back(std::move(depths));
  }

  const auto near_edge = [&](int x, int y) {
    const Eigen::Vector2d q(x, y);
    for (const auto& e : kf.edges) {
      const Eigen::Vector2d a = e.p1.vec();
      const Eigen::Vector2d ab = e.p2.vec() - a;
      const double t = std::clamp((q - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      if ((a + t * ab - q).norm() <= options.edge_clearance) return true;
    }
    return false;
  };
  const int b = std::max(options.border, 1);
  for (int y = b; y < K.height - b; ++y) {
    for (int x = b; x < K.width - b; ++x) {
      if (edge_pixels.count({x, y}) || image.gradient_magnitude(x, y) <= options.gradient_threshold) continue;
      if (near_edge(x, y)) continue;
      const auto h = depth.get(x, y);
      if (!h) continue;
      kf.depth.set(x, y, *h);
      kf.high_gradient_mask.push_back({x, y});
    }
  }
  return kf;
}

void TrackerConfig::validate() const {
  if (pyramid_levels < 1) throw Error(ErrorCode::InvalidArgument, "pyramid_levels must be at least 1");
  if (scale_factor != 2) throw Error(ErrorCode::InvalidArgument, "only a pyramid scale factor of 2 is supported");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be positive");
  if (photometric_weight < 0.0 || geometric_weight < 0.0)
    throw Error(ErrorCode::InvalidArgument, "residual family weights must be non-negative");
  if (huber_threshold && !(*huber_threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "huber threshold must be positive");
  if (!(variances.sigma_r2 > 0.0) || !(variances.sigma_g2 > 0.0) || !(variances.sigma_d2 > 0.0))
    throw Error(ErrorCode::InvalidArgument, "observation variances must be positive");
}

double ResidualSystem::cost() const { return (weights.array() * residuals.array().square()).sum(); }

std::optional<double> photometric_residual(const CameraIntrinsics& K, const Image& ref, const Image& cur,
                                           const PixelPoint& x, double inverse_depth, const Pose& ref_to_cur) {
  const Eigen::Vector3d Xc = ref_to_cur * backproject(K, x, inverse_depth);
  if (Xc.z() <= kMinDepthZ) return std::nullopt;
  const PixelPoint xw = project(K, Xc);
  const auto ref_value = ref.sample(x.u, x.v);
  const auto cur_value = cur.sample(xw.u, xw.v);
  if (!ref_value || !cur_value) return std::nullopt;
  return *ref_value - *cur_value;
}

std::optional<double> photometric_residual(const KeyframeState& kf, const Image& cur, const PixelPoint& x,
                                           const Twist& xi) {
  const auto h = kf.depth.get(static_cast<int>(std::lround(x.u)), static_cast<int>(std::lround(x.v)));
  if (!h) throw Error(ErrorCode::InvalidDepth, "no keyframe depth at the pixel");
  return photometric_residual(kf.K, kf.image, cur, x, h->mean, exp_map(xi));
}

std::optional<double> geometric_residual(const CameraIntrinsics& K, const HomogeneousLine2D& l, const PixelPoint& x,
                                         double inverse_depth, const Pose& ref_to_cur) {
  const Eigen::Vector3d Xc = ref_to_cur * backproject(K, x, inverse_depth);
  if (Xc.z() <= kMinDepthZ) return std::nullopt;
  return point_line_signed_distance(l, project(K, Xc));
}

std::optional<double> geometric_residual(const CameraIntrinsics& K, const HomogeneousLine2D& l, const PixelPoint& x,
                                         double inverse_depth, const Twist& xi) {
  return geometric_residual(K, l, x, inverse_depth, exp_map(xi));
}

TrackingLevel make_level(const KeyframeState& kf, int level, const TrackerConfig& config) {
  TrackingLevel lv;
  lv.level = level;
  lv.K = kf.K.at_level(level);
  lv.ref = downsample_times(kf.image, level);

  // Photometric support: Ω, plus edge pixels when enabled, decimated to this level.
  InverseDepthMap photo(kf.K.width, kf.K.height);
  for (const auto& p : kf.high_gradient_mask) photo.set(p.x, p.y, *kf.depth.get(p.x, p.y));
  if (config.photometric_on_edges)
    for (const auto& e : kf.edges)
      for (const auto& p : e.pixels)
        if (const auto h = kf.depth.get(p.x, p.y)) photo.set(p.x, p.y, *h);
  for (int i = 0; i < level; ++i) photo = photo.decimate();
  const int w = std::min(photo.width(), lv.ref.width());
  const int h = std::min(photo.height(), lv.ref.height());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (const auto d = photo.get(x, y)) lv.photometric.push_back({PixelIndex{x, y}.point(), lv.ref.at(x, y), d->mean});

  for (std::size_t k = 0; k < kf.edges.size(); ++k)
    for (std::size_t j = 0; j < kf.edges[k].pixels.size(); ++j)
      lv.edges.push_back({kf.edges[k].id, to_level(kf.edge_point(k, j), level), kf.edge_depths[k][j]});
  return lv;
}

ResidualSystem build_system(const TrackingLevel& lv, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                            const std::vector<EdgeMatch>& matches, const Pose& T, const TrackerConfig& config,
                            const std::optional<Pose>& weights_at) {
  ResidualSystem sys;
  const Pose& Tw = weights_at ? *weights_at : T;
  RowSink sink(config.huber_threshold);
  const CameraIntrinsics& K = lv.K;

  if (config.photometric_weight > 0.0) {
    const double w = config.photometric_weight / config.variances.sigma_r2;
    for (const auto& s : lv.photometric) {
      const Eigen::Vector3d Xc = T * backproject(K, s.x, s.inverse_depth);
      if (Xc.z() <= kMinDepthZ) {
        ++sys.dropped_photometric;
        continue;
      }
      const PixelPoint xw = project(K, Xc);
      const auto smp = cur.sample_with_gradient(xw.u, xw.v);
      if (!smp) {
        ++sys.dropped_photometric;
        continue;
      }
      const Eigen::RowVector2d grad(smp->du, smp->dv);
      const Vector6d j = -(grad * projection_jacobian(K, Xc) * point_jacobian(Xc)).transpose();
      sink.add(s.intensity - smp->value, j, w);
    }
    sys.photometric_rows = static_cast<int>(sink.size());
  }

  if (config.geometric_weight > 0.0 && !matches.empty()) {
    struct Target {
      HomogeneousLine2D line;
      Covariance3 cov;
    };
    std::unordered_map<int, Target> targets;
    for (const auto& m : matches) {
      const auto it = std::find_if(cur_edges.begin(), cur_edges.end(), [&](const auto& e) { return e.id == m.cur_id; });
      if (it == cur_edges.end()) continue;
      const PixelPoint p1 = to_level(it->p1, lv.level);
      const PixelPoint p2 = to_level(it->p2, lv.level);
      targets[m.ref_id] = {line_to_level(it->line, lv.level),
                           line_coefficient_covariance(p1, p2, config.variances.endpoint_sigma)};
    }
    for (const auto& s : lv.edges) {
      const auto it = targets.find(s.ref_id);
      if (it == targets.end()) continue;
      const Eigen::Vector3d Xc = T * backproject(K, s.x, s.depth.mean);
      if (Xc.z() <= kMinDepthZ) {
        ++sys.dropped_geometric;
        continue;
      }
      const PixelPoint xw = project(K, Xc);
      const auto& l = it->second.line;
      const Covariance2 sigma_x = warped_point_covariance(K, s.x, s.depth.mean, s.depth.variance, Tw);
      PixelPoint xv = xw;
      if (weights_at) {
        const Eigen::Vector3d Xw = Tw * backproject(K, s.x, s.depth.mean);
        if (Xw.z() > kMinDepthZ) xv = project(K, Xw);
      }
      const double var = reprojection_variance(l, it->second.cov, xv, sigma_x);
      const Vector6d j = (l.normal().transpose() * projection_jacobian(K, Xc) * point_jacobian(Xc)).transpose();
      sink.add(point_line_signed_distance(l, xw), j, config.geometric_weight / var);
    }
    sys.geometric_rows = static_cast<int>(sink.size()) - sys.photometric_rows;
  }

  if (sink.size() == 0) throw Error(ErrorCode::NoObservations, "no valid residual terms");
  sink.fill(sys);
  return sys;
}

ResidualSystem build_system(const KeyframeState& kf, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                            const std::vector<EdgeMatch>& matches, const Twist& xi, const TrackerConfig& config) {
  config.validate();
  return build_system(make_level(kf, 0, config), cur, cur_edges, matches, exp_map(xi), config);
}

Twist gauss_newton_step(const ResidualSystem& sys) {
  const auto& J = sys.jacobian;
  const Matrix6d H = J.transpose() * sys.weights.asDiagonal() * J;
  const Vector6d g = J.transpose() * (sys.weights.array() * sys.residuals.array()).matrix();
  const Eigen::SelfAdjointEigenSolver<Matrix6d> eig(H);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > 0.0) || hi / lo > kMaxCondition)
    throw Error(ErrorCode::DegenerateSystem, "normal equations are singular or ill-conditioned");
  if (g.isZero(0.0)) return {};
  return Twist::from_vector(-H.ldlt().solve(g));
}

TrackingResult track_frame(const KeyframeState& kf, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                           const std::vector<EdgeMatch>& matches, const Twist& xi_init, const TrackerConfig& config) {
  config.validate();
  if (cur.width() != kf.image.width() || cur.height() != kf.image.height())
    throw Error(ErrorCode::InvalidArgument, "current image size differs from the keyframe");

  TrackingResult result;
  Pose T = exp_map(xi_init);
  for (int level = config.pyramid_levels - 1; level >= 0; --level) {
    try {
      const TrackingLevel lv = make_level(kf, level, config);
      const Image cur_l = downsample_times(cur, level);
      const auto build = [&](const Pose& pose, const std::optional<Pose>& weights_at = std::nullopt) {
        ResidualSystem s = build_system(lv, cur_l, cur_edges, matches, pose, config, weights_at);
        const int attempted = s.attempted();
        if (attempted > 0 && static_cast<double>(attempted - s.rows()) > config.max_dropped_fraction * attempted)
          throw Error(ErrorCode::NoObservations, "more than " +
                                                     std::to_string(static_cast<int>(100 * config.max_dropped_fraction)) +
                                                     "% of residual terms dropped");
        return s;
      };

      ResidualSystem sys = build(T);
      double cost = sys.mean_cost();
      LevelTrace trace;
      trace.level = level;
      trace.costs.push_back(cost);
      for (int it = 0; it < config.max_iterations; ++it) {
        Vector6d step = gauss_newton_step(sys).vector();
        bool accepted = false;
        for (int bt = 0; bt <= config.max_backtracks; ++bt, step *= 0.5) {
          const Pose candidate = exp_map(Twist::from_vector(step)) * T;
          std::optional<ResidualSystem> next;
          try {
            next = build(candidate, T);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NoObservations) throw;
            continue;
          }
          if (next->mean_cost() <= cost) {
            T = candidate;
            sys = build(T);
            cost = sys.mean_cost();
            accepted = true;
            break;
          }
        }
        if (!accepted) break;
        ++trace.iterations;
        trace.costs.push_back(cost);
        if (step.norm() < config.convergence_eps) break;
      }
      trace.photometric_rows = sys.photometric_rows;
      trace.geometric_rows = sys.geometric_rows;
      trace.dropped_photometric = sys.dropped_photometric;
      trace.dropped_geometric = sys.dropped_geometric;
      result.levels.push_back(std::move(trace));
      result.final_cost = cost;
    } catch (const Error& e) {
      rethrow_with_level(e, level);
    }
  }
  result.ref_to_cur = T;
  result.xi = log_map(T);
  return result;
}

}  // namespace edgevo
