#include "edgevo/uncertainty.hpp"

#include <cmath>

#include "edgevo/error.hpp"

namespace edgevo {

Eigen::MatrixXd propagate(const Eigen::MatrixXd& J, const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || J.cols() != sigma.rows())
    throw Error(ErrorCode::InvalidArgument, "covariance propagation dimension mismatch");
  const Eigen::MatrixXd out = J * sigma * J.transpose();
  return 0.5 * (out + out.transpose());
}

Covariance3 line_coefficient_covariance(const PixelPoint& p1, const PixelPoint& p2, double sigma_endpoint) {
  const Eigen::Vector3d raw = p1.homogeneous().cross(p2.homogeneous());
  const double n = std::hypot(raw[0], raw[1]);
  if (!(n > 0.0)) throw Error(ErrorCode::DegenerateLine, "coincident endpoints");

  // d(p1 x p2) / d(u1, v1, u2, v2)
  Eigen::Matrix<double, 3, 4> J_raw;
  J_raw << 0.0, 1.0, 0.0, -1.0,       //
      -1.0, 0.0, 1.0, 0.0,            //
      p2.v, -p2.u, -p1.v, p1.u;

  const Eigen::Vector3d unit = raw / n;
  const Eigen::Vector3d e(unit[0], unit[1], 0.0);
  const Eigen::Matrix3d J_norm = (Eigen::Matrix3d::Identity() - unit * e.transpose()) / n;

  const Eigen::Matrix<double, 3, 4> J = J_norm * J_raw;
  const Covariance3 cov = (sigma_endpoint * sigma_endpoint) * J * J.transpose();
  return 0.5 * (cov + cov.transpose());
}

double line_distance_variance(const Covariance3& sigma_l, const PixelPoint& x) {
  const Eigen::Vector3d h = x.homogeneous();
  return h.dot(sigma_l * h);
}

double reprojection_variance(const HomogeneousLine2D& l, const Covariance3& sigma_l, const PixelPoint& x_warped,
                             const Covariance2& sigma_x) {
  const Eigen::Vector2d n = l.normal();
  const double v = n.dot(sigma_x * n) + line_distance_variance(sigma_l, x_warped);
  return std::isfinite(v) ? std::max(v, kVarianceFloor) : v;
}

Eigen::Vector2d warp_depth_derivative(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth,
                                      const Pose& ref_to_cur) {
  // X' ∝ R r + d t, so the warped pixel is a ratio of functions affine in d.
  const Eigen::Vector3d A = K.matrix() * (ref_to_cur.rotation() * pixel_ray(K, x));
  const Eigen::Vector3d B = K.matrix() * ref_to_cur.translation();
  const Eigen::Vector3d q = A + inverse_depth * B;
  if (!(q[2] > 0.0)) throw Error(ErrorCode::BehindCamera, "warped point behind the camera");
  const double q2sq = q[2] * q[2];
  return {(B[0] * q[2] - q[0] * B[2]) / q2sq, (B[1] * q[2] - q[1] * B[2]) / q2sq};
}

Covariance2 warped_point_covariance(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth,
                                    double inverse_depth_variance, const Pose& ref_to_cur) {
  const Eigen::Vector2d j = warp_depth_derivative(K, x, inverse_depth, ref_to_cur);
  return inverse_depth_variance * j * j.transpose();
}

double disparity_variance(double sigma_l2, double sigma_g2, double theta) {
  const double s = std::sin(theta);
  if (!(theta > 0.0 && theta < std::numbers::pi) || std::abs(s) < std::sin(kParallelThreshold))
    throw Error(ErrorCode::DegenerateIntersection, "epipolar line and edge are nearly parallel");
  const double c = std::cos(theta);
  return sigma_l2 / (s * s) + sigma_g2 * (c * c) / (s * s);
}

double disparity_to_inverse_depth_factor(const BaselineGeometry& g) {
  if (g.ref_to_cur.translation().norm() < 1e-9) throw Error(ErrorCode::NoParallax, "zero baseline");
  const double rate = warp_depth_derivative(g.K, g.x_ref, g.inverse_depth, g.ref_to_cur).norm();
  if (!(rate > 1e-12)) throw Error(ErrorCode::NoParallax, "pixel lies on the epipole");
  return 1.0 / rate;
}

double inverse_depth_obs_variance(double sigma_lambda2, const BaselineGeometry& geometry) {
  const double c = disparity_to_inverse_depth_factor(geometry);
  return c * c * sigma_lambda2;
}

}  // namespace edgevo
