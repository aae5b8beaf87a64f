#pragma once

#include <cstdint>
#include <vector>

#include "edgevo/edge_model.hpp"
#include "edgevo/geometry.hpp"
#include "edgevo/image.hpp"
#include "edgevo/tracking.hpp"
#include "edgevo/uncertainty.hpp"

namespace edgevo {

struct EpipolarLine {
  HomogeneousLine2D line;
  /// Unit image direction in which the match moves as inverse depth grows.
  Eigen::Vector2d direction = Eigen::Vector2d::UnitX();
};

/// Epipolar line of reference pixel x in the current image. Throws NoParallax for a zero
/// baseline or when x sits on the epipole.
EpipolarLine epipolar_line(const CameraIntrinsics& K, const Pose& ref_to_cur, const PixelPoint& x_ref);

/// Inverse depth at which x_ref maps onto `x_cur` (taken along the dominant image axis of the
/// epipolar direction). Absent when the solution is not positive.
std::optional<double> inverse_depth_from_match(const CameraIntrinsics& K, const Pose& ref_to_cur,
                                               const PixelPoint& x_ref, const PixelPoint& x_cur);

struct StereoMatch {
  PixelPoint point;             // matched location in the current image
  double disparity = 0.0;       // signed offset from the prior's projection along the epipolar direction
  double inverse_depth = 0.0;
  double ssd = 0.0;
  bool ambiguous = false;
  int samples = 0;
};

struct StereoSearchOptions {
  int patch_radius = 2;
  double step = 1.0;            // pixels between samples
  double min_half_range = 2.0;  // the window spans at least this many pixels either side
  double max_half_range = 40.0;
  /// Best-to-second-best SSD ratio above which the match is ambiguous.
  double ambiguity_ratio = 0.8;
};

/// SSD search over the epipolar segment spanned by inverse depths d ± 2σ_d, refined by a
/// parabola through the best triplet. Throws SearchOutOfBounds when no patch fits in `cur`.
StereoMatch exhaustive_stereo_search(const CameraIntrinsics& K, const Image& ref, const Image& cur,
                                     const Pose& ref_to_cur, const PixelPoint& x_ref,
                                     const DepthHypothesis& hypothesis, const StereoSearchOptions& options = {});

/// Intersection of the epipolar line with the matched edge's line. Throws
/// DegenerateIntersection when they are within kParallelThreshold of parallel.
PixelPoint line_guided_match(const EpipolarLine& epi, const HomogeneousLine2D& matched_edge);

/// 3D line (reference camera frame) from its images in the reference and current views, as the
/// intersection of the two back-projected planes. Throws DegenerateTriangulation when the
/// plane normals are parallel within 1e-6.
Line3D triangulate_line(const CameraIntrinsics& K, const Pose& ref_to_cur, const HomogeneousLine2D& l_ref,
                        const HomogeneousLine2D& l_cur);

/// Back-projection plane through the camera centre and image line l.
Plane3D backprojection_plane(const CameraIntrinsics& K, const HomogeneousLine2D& l);

/// Inverse depth of the point where the ray through x meets L (midpoint of the common
/// perpendicular when skew; depth from the ray parameter). Throws DegenerateTriangulation for
/// a ray parallel to L and BehindCamera for a non-positive depth.
double ray_line_inverse_depth(const CameraIntrinsics& K, const PixelPoint& x, const Line3D& line);

/// Precision-weighted fusion. Throws InvalidVariance for non-positive variances.
DepthHypothesis ekf_depth_update(const DepthHypothesis& prior, double obs_inverse_depth, double obs_variance);

/// Orthonormal frame spanning a back-projection plane.
struct PlaneFrame {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d x_axis = Eigen::Vector3d::UnitX();
  Eigen::Vector3d y_axis = Eigen::Vector3d::UnitY();

  Eigen::Vector3d normal() const { return x_axis.cross(y_axis); }
  Eigen::Vector2d to_frame(const Eigen::Vector3d& X) const {
    const Eigen::Vector3d r = X - origin;
    return {r.dot(x_axis), r.dot(y_axis)};
  }
  Eigen::Vector3d from_frame(const Eigen::Vector2d& p) const { return origin + p.x() * x_axis + p.y() * y_axis; }
  Eigen::Matrix<double, 2, 3> projector() const {
    Eigen::Matrix<double, 2, 3> P;
    P << x_axis.transpose(), y_axis.transpose();
    return P;
  }
};

struct WeightedPoint2 {
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  Covariance2 cov = Covariance2::Identity();
};

/// min over q on the line of (p − q)ᵀ Σ⁻¹ (p − q) = (nᵀp + c)² / (nᵀ Σ n), the denominator
/// floored at kVarianceFloor.
double mahalanobis_point_line(const WeightedPoint2& p, const HomogeneousLine2D& line_in_frame);

/// Closed-form weighted least squares y = β₀ + β₁ x after subtracting the weighted mean;
/// returns (β₀, β₁) in the original coordinates. Throws TooFewPoints for fewer than 2 points
/// and DegenerateSystem when the x spread vanishes.
Eigen::Vector2d weighted_line_fit(const std::vector<Eigen::Vector2d>& points, const std::vector<double>& weights);

struct RegularizationOptions {
  int ransac_iterations = 100;
  double inlier_threshold = 5.99;  // Mahalanobis², χ² 2 dof at 95%
  double min_consensus = 0.5;
  std::uint64_t seed = 0;
  double pixel_sigma = 1.0;
};

struct RegularizationResult {
  std::vector<DepthHypothesis> depths;
  Line3D line;  // reference camera frame
  PlaneFrame frame;
  std::vector<bool> inliers;
  int inlier_count = 0;
  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
  double variance_scale = 1.0;
};

/// Depth samples are taken at the foot points of `edge.pixels` on `edge.line`, aligned with
/// `depths`. Throws TooFewPoints below 4 samples and NoConsensus when RANSAC keeps under half.
RegularizationResult regularize_edge_depths(const CameraIntrinsics& K, const LineSegment2D& edge,
                                            const std::vector<DepthHypothesis>& depths,
                                            const RegularizationOptions& options = {});

struct MappingConfig {
  ObservationVariances variances;
  StereoSearchOptions search;
  RegularizationOptions regularization;
  bool line_guided = true;
  bool regularize = true;
  double gate_sigma = 3.0;
};

struct MappingStats {
  int attempted = 0;
  int line_guided = 0;
  int exhaustive = 0;
  int fused = 0;
  int gated = 0;
  int ambiguous = 0;
  int out_of_bounds = 0;
  int no_parallax = 0;
  int degenerate = 0;
  int invalid = 0;
  int regularized_edges = 0;
  int regularization_failures = 0;

  double line_guided_fraction() const {
    const int n = line_guided + exhaustive;
    return n > 0 ? static_cast<double>(line_guided) / n : 0.0;
  }
};

/// Stage 1 matches every depth pixel (line-guided on matched edges, exhaustive elsewhere) and
/// fuses the observation; stage 2 regularises each matched edge. Per-pixel failures are
/// counted, never thrown.
MappingStats update_keyframe_depth(KeyframeState& kf, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                                   const std::vector<EdgeMatch>& matches, const Pose& ref_to_cur,
                                   const MappingConfig& config = {});

}  // namespace edgevo
