#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "edgevo/edge_model.hpp"
#include "edgevo/geometry.hpp"
#include "edgevo/image.hpp"
#include "edgevo/uncertainty.hpp"

namespace edgevo {

/// Reference frame for tracking and mapping. The depth map holds each pixel's own surface depth
/// (used by photometric rows). Edge pixels additionally carry line depths sampled at the pixel's
/// foot point on the reference line, which is what geometric rows and regularisation use.
struct KeyframeState {
  CameraIntrinsics K;
  Pose pose;  // camera to world, for bookkeeping only
  Image image;
  InverseDepthMap depth;
  std::vector<LineSegment2D> edges;  // pixels traced with one-pixel expansion
  std::vector<std::vector<DepthHypothesis>> edge_depths;  // aligned with edges[k].pixels
  std::vector<PixelIndex> high_gradient_mask;

  /// Foot of the perpendicular from edge pixel j of edge k onto its line.
  PixelPoint edge_point(std::size_t k, std::size_t j) const;
  /// Index into `edges` for an id, or -1.
  int edge_index(int id) const;
};

struct KeyframeOptions {
  double gradient_threshold = 6.0;
  int edge_expand = 1;
  int border = 2;
  /// Ω excludes pixels this close to an edge, where views disagree about mixed pixels.
  double edge_clearance = 4.0;
};

/// Builds the keyframe: Ω = pixels with gradient above threshold and a defined depth away from
/// edges, edge pixels traced from `edges` and kept only where `depth` is defined. `edge_depth(k, x)` supplies the inverse depth at foot point x of
/// edge k; absent means the pixel is skipped.
KeyframeState make_keyframe(const CameraIntrinsics& K, const Pose& pose, const Image& image,
                            const InverseDepthMap& depth, const std::vector<LineSegment2D>& edges,
                            const std::function<std::optional<DepthHypothesis>(std::size_t, const PixelPoint&)>& edge_depth,
                            const KeyframeOptions& options = {});

struct TrackerConfig {
  int pyramid_levels = 2;
  int scale_factor = 2;
  int max_iterations = 20;
  double convergence_eps = 1e-7;
  /// Huber threshold in standard deviations of the row; disabled when empty.
  std::optional<double> huber_threshold;
  double photometric_weight = 1.0;
  double geometric_weight = 1.0;
  /// Edge pixels also contribute photometric rows. Off by default: edge pixels sit on depth
  /// discontinuities where the two views see different surfaces.
  bool photometric_on_edges = false;
  int max_backtracks = 5;
  /// Fraction of attempted rows that may drop before tracking gives up.
  double max_dropped_fraction = 0.9;
  ObservationVariances variances;

  void validate() const;
};

/// Stacked residuals E, Jacobian ∂E/∂δ for the left perturbation exp(δ)·T, and weights.
struct ResidualSystem {
  Eigen::VectorXd residuals;
  Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor> jacobian;
  Eigen::VectorXd weights;
  int photometric_rows = 0;
  int geometric_rows = 0;
  int dropped_photometric = 0;
  int dropped_geometric = 0;

  int rows() const { return static_cast<int>(residuals.size()); }
  int attempted() const { return rows() + dropped_photometric + dropped_geometric; }
  /// ‖W^{1/2} E‖².
  double cost() const;
  double mean_cost() const { return rows() > 0 ? cost() / rows() : 0.0; }
};

/// I_ref(x) − I(τ(x, d, T)); absent when the warp leaves the sampleable domain or goes behind
/// the camera.
std::optional<double> photometric_residual(const CameraIntrinsics& K, const Image& ref, const Image& cur,
                                           const PixelPoint& x, double inverse_depth, const Pose& ref_to_cur);
std::optional<double> photometric_residual(const KeyframeState& kf, const Image& cur, const PixelPoint& x,
                                           const Twist& xi);

/// lᵀ τ̂(x, d, T) with l normalised. Absent when the point goes behind the camera.
std::optional<double> geometric_residual(const CameraIntrinsics& K, const HomogeneousLine2D& l, const PixelPoint& x,
                                         double inverse_depth, const Pose& ref_to_cur);
std::optional<double> geometric_residual(const CameraIntrinsics& K, const HomogeneousLine2D& l, const PixelPoint& x,
                                         double inverse_depth, const Twist& xi);

/// One pyramid level of the keyframe: intrinsics, image, photometric samples and edge samples.
struct TrackingLevel {
  int level = 0;
  CameraIntrinsics K;
  Image ref;
  struct PhotoSample {
    PixelPoint x;
    double intensity = 0.0;
    double inverse_depth = 1.0;
  };
  struct EdgeSample {
    int ref_id = 0;
    PixelPoint x;  // foot point, level coordinates
    DepthHypothesis depth;
  };
  std::vector<PhotoSample> photometric;
  std::vector<EdgeSample> edges;
};

/// Pyramid level `level` of the keyframe (0 = full resolution).
TrackingLevel make_level(const KeyframeState& kf, int level, const TrackerConfig& config);

/// Stacks photometric rows over Ω and geometric rows over matched edge pixels at one level.
/// Geometric variances are evaluated at `weights_at` when given, so candidate poses of a line
/// search are compared under the weights the step was solved with. Throws NoObservations when
/// no row survives.
ResidualSystem build_system(const TrackingLevel& level, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                            const std::vector<EdgeMatch>& matches, const Pose& ref_to_cur, const TrackerConfig& config,
                            const std::optional<Pose>& weights_at = std::nullopt);

/// Full-resolution convenience overload.
ResidualSystem build_system(const KeyframeState& kf, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                            const std::vector<EdgeMatch>& matches, const Twist& xi, const TrackerConfig& config = {});

/// δ = −(JᵀWJ)⁻¹ JᵀW E. Throws DegenerateSystem when the normal matrix has condition number
/// above 1e12.
Twist gauss_newton_step(const ResidualSystem& sys);

struct LevelTrace {
  int level = 0;
  std::vector<double> costs;  // mean weighted cost of each accepted iterate, starting value first
  int iterations = 0;
  int photometric_rows = 0;
  int geometric_rows = 0;
  int dropped_photometric = 0;
  int dropped_geometric = 0;
};

struct TrackingResult {
  Twist xi;
  Pose ref_to_cur;
  std::vector<LevelTrace> levels;  // coarse to fine
  double final_cost = 0.0;
};

/// Coarse-to-fine Gauss-Newton with left-composed increments and step-halving backtracking.
/// Errors carry the failing level in their message.
TrackingResult track_frame(const KeyframeState& kf, const Image& cur, const std::vector<LineSegment2D>& cur_edges,
                           const std::vector<EdgeMatch>& matches, const Twist& xi_init,
                           const TrackerConfig& config = {});

}  // namespace edgevo
