#include "edgevo/mapping.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "edgevo/error.hpp"

namespace edgevo {

namespace {

struct Epipolar {
  Eigen::Vector3d A;  // K R r: image of the point at infinity
  Eigen::Vector3d B;  // K t: the epipole
};

Epipolar epipolar_terms(const CameraIntrinsics& K, const Pose& T, const PixelPoint& x) {
  return {K.matrix() * (T.rotation() * pixel_ray(K, x)), K.matrix() * T.translation()};
}

Eigen::Vector2d image_gradient(const Image& img, int x, int y) {
  if (x <= 0 || y <= 0 || x >= img.width() - 1 || y >= img.height() - 1) return Eigen::Vector2d::Zero();
  return {0.5 * (img.at(x + 1, y) - img.at(x - 1, y)), 0.5 * (img.at(x, y + 1) - img.at(x, y - 1))};
}

bool patch_fits(const Image& img, const PixelPoint& p, int r) {
  return img.sampleable(p.u - r, p.v - r) && img.sampleable(p.u + r, p.v + r);
}

}  // namespace

EpipolarLine epipolar_line(const CameraIntrinsics& K, const Pose& ref_to_cur, const PixelPoint& x_ref) {
  if (ref_to_cur.translation().norm() < 1e-9) throw Error(ErrorCode::NoParallax, "zero baseline");
  const auto [A, B] = epipolar_terms(K, ref_to_cur, x_ref);
  const Eigen::Vector3d l = A.cross(B);
  const Eigen::Vector2d dir(B[0] * A[2] - A[0] * B[2], B[1] * A[2] - A[1] * B[2]);
  if (std::hypot(l[0], l[1]) < 1e-12 * A.norm() * B.norm() || dir.norm() < 1e-12)
    throw Error(ErrorCode::NoParallax, "pixel lies on the epipole");
  return {HomogeneousLine2D::from_coeffs(l), dir.normalized()};
}

std::optional<double> inverse_depth_from_match(const CameraIntrinsics& K, const Pose& ref_to_cur,
                                               const PixelPoint& x_ref, const PixelPoint& x_cur) {
  const auto [A, B] = epipolar_terms(K, ref_to_cur, x_ref);
  const Eigen::Vector2d dir(B[0] * A[2] - A[0] * B[2], B[1] * A[2] - A[1] * B[2]);
  const int axis = std::abs(dir.x()) >= std::abs(dir.y()) ? 0 : 1;
  const double m = axis == 0 ? x_cur.u : x_cur.v;
  const double den = m * B[2] - B[axis];
  if (std::abs(den) < 1e-15) return std::nullopt;
  const double d = (A[axis] - m * A[2]) / den;
  if (!(d > 0.0) || !std::isfinite(d) || !(A[2] + d * B[2] > 0.0)) return std::nullopt;
  return d;
}

StereoMatch exhaustive_stereo_search(const CameraIntrinsics& K, const Image& ref, const Image& cur,
                                     const Pose& ref_to_cur, const PixelPoint& x_ref,
                                     const DepthHypothesis& hypothesis, const StereoSearchOptions& options) {
  const EpipolarLine epi = epipolar_line(K, ref_to_cur, x_ref);
  const int r = options.patch_radius;
  if (!patch_fits(ref, x_ref, r)) throw Error(ErrorCode::SearchOutOfBounds, "reference patch leaves the image");

  const double sigma = std::sqrt(std::max(hypothesis.variance, 0.0));
  const double d_lo = std::max(hypothesis.mean - 2.0 * sigma, 1e-3 * hypothesis.mean);
  const double d_hi = hypothesis.mean + 2.0 * sigma;
  const auto [A, B] = epipolar_terms(K, ref_to_cur, x_ref);
  const auto image_at = [&](double d) -> std::optional<Eigen::Vector2d> {
    const Eigen::Vector3d q = A + d * B;
    if (!(q[2] > 1e-9)) return std::nullopt;
    return Eigen::Vector2d(q[0] / q[2], q[1] / q[2]);
  };
  const auto center = image_at(hypothesis.mean);
  if (!center) throw Error(ErrorCode::SearchOutOfBounds, "prior depth maps behind the camera");
  double s_lo = -options.min_half_range;
  double s_hi = options.min_half_range;
  if (const auto p = image_at(d_lo)) s_lo = std::min(s_lo, (*p - *center).dot(epi.direction));
  if (const auto p = image_at(d_hi)) s_hi = std::max(s_hi, (*p - *center).dot(epi.direction));
  else s_hi = options.max_half_range;
  s_lo = std::max(s_lo, -options.max_half_range);
  s_hi = std::min(s_hi, options.max_half_range);

  std::vector<double> ref_patch;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) ref_patch.push_back(*ref.sample(x_ref.u + dx, x_ref.v + dy));

  const int n = static_cast<int>(std::floor((s_hi - s_lo) / options.step)) + 1;
  std::vector<double> ssd(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
  int best = -1;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d p = *center + (s_lo + i * options.step) * epi.direction;
    if (!patch_fits(cur, PixelPoint::from(p), r)) continue;
    double acc = 0.0;
    std::size_t k = 0;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const double e = ref_patch[k++] - *cur.sample(p.x() + dx, p.y() + dy);
        acc += e * e;
      }
    ssd[static_cast<std::size_t>(i)] = acc;
    if (best < 0 || acc < ssd[static_cast<std::size_t>(best)]) best = i;
  }
  if (best < 0) throw Error(ErrorCode::SearchOutOfBounds, "search interval lies outside the current image");

  StereoMatch m;
  m.samples = static_cast<int>(std::count_if(ssd.begin(), ssd.end(), [](double v) { return !std::isnan(v); }));
  m.ssd = ssd[static_cast<std::size_t>(best)];
  double second = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (std::abs(i - best) >= 2 && !std::isnan(ssd[static_cast<std::size_t>(i)]))
      second = std::min(second, ssd[static_cast<std::size_t>(i)]);
  m.ambiguous = std::isfinite(second) && m.ssd >= options.ambiguity_ratio * second;

  double offset = 0.0;
  if (best > 0 && best + 1 < n) {
    const double a = ssd[static_cast<std::size_t>(best - 1)];
    const double c = ssd[static_cast<std::size_t>(best + 1)];
    const double den = a - 2.0 * m.ssd + c;
    if (!std::isnan(a) && !std::isnan(c) && den > 0.0) offset = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
  }
  m.disparity = s_lo + (best + offset) * options.step;
  m.point = PixelPoint::from(*center + m.disparity * epi.direction);
  m.inverse_depth = inverse_depth_from_match(K, ref_to_cur, x_ref, m.point).value_or(std::numeric_limits<double>::quiet_NaN());
  return m;
}

PixelPoint line_guided_match(const EpipolarLine& epi, const HomogeneousLine2D& matched_edge) {
  if (angle_between_lines(epi.line, matched_edge) < kParallelThreshold)
    throw Error(ErrorCode::DegenerateIntersection, "edge is nearly parallel to the epipolar line");
  const Eigen::Vector3d p = epi.line.coeffs().cross(matched_edge.coeffs());
  if (std::abs(p[2]) < 1e-15) throw Error(ErrorCode::DegenerateIntersection, "lines meet at infinity");
  return {p[0] / p[2], p[1] / p[2]};
}

Plane3D backprojection_plane(const CameraIntrinsics& K, const HomogeneousLine2D& l) {
  const Eigen::Vector3d n = K.matrix().transpose() * l.coeffs();
  return Plane3D::from_coeffs(Eigen::Vector4d(n[0], n[1], n[2], 0.0));
}

Line3D triangulate_line(const CameraIntrinsics& K, const Pose& ref_to_cur, const HomogeneousLine2D& l_ref,
                        const HomogeneousLine2D& l_cur) {
  const Eigen::Matrix3d Kt = K.matrix().transpose();
  const Eigen::Vector3d n1 = Kt * l_ref.coeffs();
  const Eigen::Vector3d n2 = ref_to_cur.rotation().transpose() * (Kt * l_cur.coeffs());
  const double d2 = l_cur.coeffs().dot(K.matrix() * ref_to_cur.translation());
  const double s1 = n1.norm();
  const double s2 = n2.norm();
  const Eigen::Vector3d dir = (n1 / s1).cross(n2 / s2);
  if (dir.norm() < 1e-6) throw Error(ErrorCode::DegenerateTriangulation, "back-projection planes are parallel");

  Eigen::Matrix3d M;
  M << (n1 / s1).transpose(), (n2 / s2).transpose(), dir.normalized().transpose();
  const Eigen::Vector3d rhs(0.0, -d2 / s2, 0.0);
  return {M.partialPivLu().solve(rhs), dir.normalized()};
}

double ray_line_inverse_depth(const CameraIntrinsics& K, const PixelPoint& x, const Line3D& line) {
  const Eigen::Vector3d r = pixel_ray(K, x);  // z = 1, so the ray parameter is the depth
  const Eigen::Vector3d& d = line.direction;
  const Eigen::Vector3d& p = line.point;
  const double a = r.dot(r), b = r.dot(d), c = d.dot(d), e = r.dot(p), f = d.dot(p);
  const double den = a * c - b * b;
  if (den < 1e-14 * a * c) throw Error(ErrorCode::DegenerateTriangulation, "ray parallel to the 3D line");
  const double s = (c * e - b * f) / den;
  if (!(s > 1e-9)) throw Error(ErrorCode::BehindCamera, "line meets the ray behind the camera");
  return 1.0 / s;
}

DepthHypothesis ekf_depth_update(const DepthHypothesis& prior, double obs_inverse_depth, double obs_variance) {
  if (!(prior.variance > 0.0) || !(obs_variance > 0.0) || !std::isfinite(prior.variance))
    throw Error(ErrorCode::InvalidVariance, "variances must be positive");
  if (!std::isfinite(obs_inverse_depth) || !std::isfinite(prior.mean))
    throw Error(ErrorCode::InvalidArgument, "non-finite inverse depth");
  if (!std::isfinite(obs_variance)) return prior;
  const double s = prior.variance + obs_variance;
  return {(obs_variance * prior.mean + prior.variance * obs_inverse_depth) / s, prior.variance * obs_variance / s};
}

double mahalanobis_point_line(const WeightedPoint2& p, const HomogeneousLine2D& line) {
  const Eigen::Vector2d n = line.normal();
  const double e = n.dot(p.p) + line.c;
  return e * e / std::max(n.dot(p.cov * n), kVarianceFloor);
}

Eigen::Vector2d weighted_line_fit(const std::vector<Eigen::Vector2d>& points, const std::vector<double>& weights) {
  if (points.size() != weights.size()) throw Error(ErrorCode::InvalidArgument, "one weight per point");
  if (points.size() < 2) throw Error(ErrorCode::TooFewPoints, "line fit needs two points");
  double sw = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    sw += weights[i];
    mean += weights[i] * points[i];
  }
  mean /= sw;

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixX2d X(n, 2);
  Eigen::VectorXd Y(n);
  Eigen::VectorXd W(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d c = points[static_cast<std::size_t>(i)] - mean;
    X(i, 0) = 1.0;
    X(i, 1) = c.x();
    Y[i] = c.y();
    W[i] = weights[static_cast<std::size_t>(i)];
  }
  const Eigen::Matrix2d XtWX = X.transpose() * W.asDiagonal() * X;
  if (std::abs(XtWX.determinant()) < 1e-12 * XtWX.squaredNorm())
    throw Error(ErrorCode::DegenerateSystem, "points have no spread along x");
  const Eigen::Vector2d beta = XtWX.inverse() * (X.transpose() * W.asDiagonal() * Y);
  return {mean.y() + beta[0] - beta[1] * mean.x(), beta[1]};
}

RegularizationResult regularize_edge_depths(const CameraIntrinsics& K, const LineSegment2D& edge,
                                            const std::vector<DepthHypothesis>& depths,
                                            const RegularizationOptions& options) {
  if (depths.size() != edge.pixels.size()) throw Error(ErrorCode::InvalidArgument, "one depth per edge pixel");
  const std::size_t n = depths.size();
  if (n < 4) throw Error(ErrorCode::TooFewPoints, "regularisation needs at least 4 depths");

  RegularizationResult out;
  out.depths = depths;
  out.inliers.assign(n, false);

  const Eigen::Vector3d normal = backprojection_plane(K, edge.line).n;
  std::vector<PixelPoint> feet(n);
  std::vector<Eigen::Vector3d> X(n);
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    feet[i] = edge.line.closest_point(edge.pixels[i].point());
    X[i] = backproject(K, feet[i], depths[i].mean);
    centroid += X[i];
  }
  centroid /= static_cast<double>(n);
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& x : X) scatter += (x - centroid) * (x - centroid).transpose();
  Eigen::Vector3d axis = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(scatter).eigenvectors().col(2);
  axis -= axis.dot(normal) * normal;
  if (axis.norm() < 1e-12) axis = normal.unitOrthogonal();

  PlaneFrame& F = out.frame;
  F.origin = Eigen::Vector3d::Zero();
  F.x_axis = axis.normalized();
  F.y_axis = normal.cross(F.x_axis).normalized();
  const Eigen::Matrix<double, 2, 3> P = F.projector();

  const double f = 0.5 * (K.fx + K.fy);
  std::vector<WeightedPoint2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = depths[i].mean;
    const Eigen::Vector3d r = pixel_ray(K, feet[i]);
    const Eigen::Vector3d rhat = r.normalized();
    const double sigma_along = std::sqrt(depths[i].variance) / (d * d) * r.norm();
    const double sigma_perp = options.pixel_sigma / (d * f);
    const Eigen::Vector3d perp = normal.cross(rhat);
    const Eigen::Matrix3d S = sigma_along * sigma_along * rhat * rhat.transpose() +
                              sigma_perp * sigma_perp * perp * perp.transpose();
    pts[i] = {F.to_frame(X[i]), P * S * P.transpose()};
  }

  std::mt19937_64 rng(options.seed ^ (static_cast<std::uint64_t>(edge.id) * 0x9E3779B97F4A7C15ull));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<bool> best;
  int best_count = -1;
  double best_spread = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.ransac_iterations; ++it) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j || (pts[i].p - pts[j].p).norm() < 1e-12) continue;
    const HomogeneousLine2D line = HomogeneousLine2D::from_coeffs(
        Eigen::Vector3d(pts[i].p.x(), pts[i].p.y(), 1.0).cross(Eigen::Vector3d(pts[j].p.x(), pts[j].p.y(), 1.0)));
    std::vector<bool> in(n, false);
    int count = 0;
    double spread = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double m = mahalanobis_point_line(pts[k], line);
      if (m < options.inlier_threshold) {
        in[k] = true;
        ++count;
        spread += m;
      }
    }
    if (count > best_count || (count == best_count && spread < best_spread)) {
      best = std::move(in);
      best_count = count;
      best_spread = spread;
    }
  }
  if (best_count < options.min_consensus * static_cast<double>(n))
    throw Error(ErrorCode::NoConsensus, std::to_string(std::max(best_count, 0)) + " of " + std::to_string(n) +
                                            " depths agree on a line");

  std::vector<Eigen::Vector2d> fit_points;
  std::vector<double> fit_weights;
  for (std::size_t k = 0; k < n; ++k) {
    if (!best[k]) continue;
    fit_points.push_back(pts[k].p);
    fit_weights.push_back(1.0 / std::max(pts[k].cov(1, 1), kVarianceFloor));
  }
  out.beta = weighted_line_fit(fit_points, fit_weights);
  out.line.point = F.from_frame({0.0, out.beta[0]});
  out.line.direction = (F.x_axis + out.beta[1] * F.y_axis).normalized();

  // Post-fit over pre-fit weighted scatter, never inflating the variance.
  double sw = 0.0, ym = 0.0;
  for (std::size_t k = 0; k < fit_points.size(); ++k) {
    sw += fit_weights[k];
    ym += fit_weights[k] * fit_points[k].y();
  }
  ym /= sw;
  double pre = 0.0, post = 0.0;
  for (std::size_t k = 0; k < fit_points.size(); ++k) {
    const double dy = fit_points[k].y() - ym;
    const double e = fit_points[k].y() - out.beta[0] - out.beta[1] * fit_points[k].x();
    pre += fit_weights[k] * dy * dy;
    post += fit_weights[k] * e * e;
  }
  out.variance_scale = pre > 1e-300 ? std::clamp(post / pre, 0.0, 1.0) : 1.0;

  for (std::size_t k = 0; k < n; ++k) {
    if (!best[k]) continue;
    double mean = 0.0;
    try {
      mean = ray_line_inverse_depth(K, feet[k], out.line);
    } catch (const Error&) {
      continue;
    }
    out.inliers[k] = true;
    ++out.inlier_count;
    out.depths[k] = {mean, std::max(depths[k].variance * out.variance_scale, kVarianceFloor)};
  }
  return out;
}

namespace {

struct Observation {
  double inverse_depth;
  double variance;
};

// Disparity variance of a photometric match: the local isophote plays the role of the edge.
Observation photometric_observation(const CameraIntrinsics& K, const Image& ref, const Pose& T, const PixelPoint& x,
                                    int px, int py, const StereoMatch& m, const EpipolarLine& epi,
                                    const ObservationVariances& v) {
  const Eigen::Vector2d g = image_gradient(ref, px, py);
  if (g.norm() < 1e-6) throw Error(ErrorCode::DegenerateIntersection, "no image gradient");
  const Eigen::Vector2d isophote(-g.y() / g.norm(), g.x() / g.norm());
  const double cos_t = std::clamp(std::abs(isophote.dot(epi.direction)), 0.0, 1.0);
  const double theta = std::acos(cos_t);
  const double sigma_l2 = 2.0 * v.sigma_r2 / g.squaredNorm();
  const double var_lambda = disparity_variance(sigma_l2, v.sigma_g2, theta);
  return {m.inverse_depth, inverse_depth_obs_variance(var_lambda, {K, T, x, m.inverse_depth})};
}

}  // namespace

MappingStats update_keyframe_depth(KeyframeState& kf, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                                   const std::vector<EdgeMatch>& matches, const Pose& T, const MappingConfig& config) {
  MappingStats stats;
  const CameraIntrinsics& K = kf.K;
  std::size_t edge_pixel_count = 0;
  for (const auto& e : kf.edges) edge_pixel_count += e.pixels.size();
  if (T.translation().norm() < 1e-9) {
    stats.attempted = static_cast<int>(kf.depth.defined_count() + edge_pixel_count);
    stats.no_parallax = stats.attempted;
    return stats;
  }

  const auto fuse = [&](const DepthHypothesis& prior, const Observation& obs) -> std::optional<DepthHypothesis> {
    if (!std::isfinite(obs.inverse_depth) || !(obs.inverse_depth > 0.0) || !(obs.variance > 0.0)) {
      ++stats.invalid;
      return std::nullopt;
    }
    if (std::abs(obs.inverse_depth - prior.mean) > config.gate_sigma * std::sqrt(prior.variance + obs.variance)) {
      ++stats.gated;
      return std::nullopt;
    }
    ++stats.fused;
    return ekf_depth_update(prior, obs.inverse_depth, obs.variance);
  };

  const auto exhaustive = [&](const PixelPoint& x, int px, int py, const DepthHypothesis& prior) -> std::optional<DepthHypothesis> {
    const EpipolarLine epi = epipolar_line(K, T, x);
    const StereoMatch m = exhaustive_stereo_search(K, kf.image, cur, T, x, prior, config.search);
    ++stats.exhaustive;
    if (m.ambiguous) {
      ++stats.ambiguous;
      return std::nullopt;
    }
    return fuse(prior, photometric_observation(K, kf.image, T, x, px, py, m, epi, config.variances));
  };

  const auto guarded = [&](auto&& fn) -> std::optional<DepthHypothesis> {
    ++stats.attempted;
    try {
      return fn();
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::NoParallax: ++stats.no_parallax; break;
        case ErrorCode::SearchOutOfBounds: ++stats.out_of_bounds; break;
        case ErrorCode::DegenerateIntersection:
        case ErrorCode::DegenerateTriangulation: ++stats.degenerate; break;
        default: ++stats.invalid; break;
      }
    }
    return std::nullopt;
  };

  // Stage 1a: the photometric map (Ω and edge pixels), exhaustive search.
  for (const auto& p : kf.depth.defined_pixels()) {
    const auto prior = *kf.depth.get(p.x, p.y);
    if (const auto post = guarded([&] { return exhaustive(p.point(), p.x, p.y, prior); })) kf.depth.set(p.x, p.y, *post);
  }

  // Stage 1b: line depths of edge pixels, line-guided where the edge has a match.
  std::unordered_map<int, const LineSegment2D*> cur_by_ref;
  for (const auto& m : matches) {
    const auto it = std::find_if(cur_edges.begin(), cur_edges.end(), [&](const auto& e) { return e.id == m.cur_id; });
    if (it != cur_edges.end()) cur_by_ref[m.ref_id] = &*it;
  }
  for (std::size_t k = 0; k < kf.edges.size(); ++k) {
    const auto& edge = kf.edges[k];
    const auto match = cur_by_ref.find(edge.id);
    const LineSegment2D* target = match == cur_by_ref.end() ? nullptr : match->second;
    const Covariance3 sigma_l = target ? line_coefficient_covariance(target->p1, target->p2, config.variances.endpoint_sigma)
                                       : Covariance3::Zero();
    for (std::size_t j = 0; j < edge.pixels.size(); ++j) {
      const PixelPoint x = kf.edge_point(k, j);
      const DepthHypothesis prior = kf.edge_depths[k][j];
      const auto post = guarded([&]() -> std::optional<DepthHypothesis> {
        const EpipolarLine epi = epipolar_line(K, T, x);
        if (target && config.line_guided) {
          try {
            const PixelPoint xm = line_guided_match(epi, target->line);
            ++stats.line_guided;
            const auto d = inverse_depth_from_match(K, T, x, xm);
            if (!d) {
              ++stats.invalid;
              return std::nullopt;
            }
            const double theta = angle_between_lines(epi.line, target->line);
            const double sigma_l2 = std::max(line_distance_variance(sigma_l, xm), kVarianceFloor);
            const double var_lambda = disparity_variance(sigma_l2, config.variances.sigma_g2, theta);
            return fuse(prior, {*d, inverse_depth_obs_variance(var_lambda, {K, T, x, *d})});
          } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateIntersection) throw;
          }
        }
        return exhaustive(x, edge.pixels[j].x, edge.pixels[j].y, prior);
      });
      if (post) kf.edge_depths[k][j] = *post;
    }
  }

  // Stage 2: analytic line regularisation per matched edge.
  if (config.regularize) {
    for (std::size_t k = 0; k < kf.edges.size(); ++k) {
      if (!cur_by_ref.count(kf.edges[k].id)) continue;
      try {
        RegularizationOptions opts = config.regularization;
        const auto reg = regularize_edge_depths(K, kf.edges[k], kf.edge_depths[k], opts);
        kf.edge_depths[k] = reg.depths;
        ++stats.regularized_edges;
      } catch (const Error&) {
        ++stats.regularization_failures;
      }
    }
  }

  return stats;
}

}  // namespace edgevo
