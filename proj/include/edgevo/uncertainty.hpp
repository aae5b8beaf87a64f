#pragma once

#include <Eigen/Core>
#include <numbers>

#include "edgevo/geometry.hpp"

namespace edgevo {

using Covariance2 = Eigen::Matrix2d;
using Covariance3 = Eigen::Matrix3d;

inline constexpr double kVarianceFloor = 1e-6;
/// Lines closer than this to parallel give no usable intersection.
inline constexpr double kParallelThreshold = 5.0 * std::numbers::pi / 180.0;
/// Endpoint standard deviation assumed for detected line segments (pixels).
inline constexpr double kDefaultEndpointSigma = 1.0;

/// Noise levels feeding the inverse-variance weights of tracking and mapping.
struct ObservationVariances {
  double sigma_r2 = 4.0;   // photometric, intensity²
  double sigma_g2 = 1.0;   // epipolar line positioning, pixels²
  double sigma_d2 = 1e-4;  // default inverse-depth observation variance
  double endpoint_sigma = kDefaultEndpointSigma;
};

/// J Σ Jᵀ, symmetrised. Throws InvalidArgument on non-conforming dimensions.
Eigen::MatrixXd propagate(const Eigen::MatrixXd& J, const Eigen::MatrixXd& sigma);

/// Covariance of the normalised line through p1, p2 when each endpoint carries isotropic
/// noise with standard deviation `sigma_endpoint`.
Covariance3 line_coefficient_covariance(const PixelPoint& p1, const PixelPoint& p2,
                                        double sigma_endpoint = kDefaultEndpointSigma);

/// Variance of a point-to-line distance: the point term projects Σ_x onto the line normal,
/// the line term uses the homogeneous point (u, v, 1). Never below kVarianceFloor.
double reprojection_variance(const HomogeneousLine2D& l, const Covariance3& sigma_l, const PixelPoint& x_warped,
                             const Covariance2& sigma_x);

/// Variance of a point-to-line distance caused by line uncertainty alone.
double line_distance_variance(const Covariance3& sigma_l, const PixelPoint& x);

/// d x' / d(inverse depth) of the warp of x.
Eigen::Vector2d warp_depth_derivative(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth,
                                      const Pose& ref_to_cur);

/// 2D covariance of the warped point induced by the inverse-depth variance.
Covariance2 warped_point_covariance(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth,
                                    double inverse_depth_variance, const Pose& ref_to_cur);

/// σ_λ² = σ_l² / sin²θ + σ_g² cot²θ. Throws DegenerateIntersection when the lines are within
/// kParallelThreshold of parallel.
double disparity_variance(double sigma_l2, double sigma_g2, double theta);

/// Local stereo geometry of one reference pixel.
struct BaselineGeometry {
  CameraIntrinsics K;
  Pose ref_to_cur;
  PixelPoint x_ref;
  double inverse_depth = 1.0;
};

/// |d(inverse depth) / d(disparity)| along the epipolar line. Throws NoParallax for a zero baseline.
double disparity_to_inverse_depth_factor(const BaselineGeometry& geometry);

/// c² σ_λ² with c from disparity_to_inverse_depth_factor.
double inverse_depth_obs_variance(double sigma_lambda2, const BaselineGeometry& geometry);

}  // namespace edgevo
