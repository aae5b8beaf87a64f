#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace edgevo {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Matrix26d = Eigen::Matrix<double, 2, 6>;
using Matrix36d = Eigen::Matrix<double, 3, 6>;

/// Continuous image coordinate in pixels; integer values are pixel centres.
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  Eigen::Vector2d vec() const { return {u, v}; }
  Eigen::Vector3d homogeneous() const { return {u, v, 1.0}; }
  static PixelPoint from(const Eigen::Vector2d& p) { return {p.x(), p.y()}; }
};

/// Pinhole model without distortion.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  /// Throws InvalidArgument unless fx, fy > 0 and the principal point is inside the image.
  void validate() const;

  Eigen::Matrix3d matrix() const;
  Eigen::Matrix3d inverse_matrix() const;

  /// Intrinsics of pyramid level `level` built by 2x2 block averaging.
  CameraIntrinsics at_level(int level) const;

  bool contains(const PixelPoint& x, double margin = 0.0) const {
    return x.u >= margin && x.v >= margin && x.u <= width - 1 - margin &&
           x.v <= height - 1 - margin;
  }
};

/// Minimal se(3) parameterisation: translation part first, then axis-angle rotation.
struct Twist {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Vector3d w = Eigen::Vector3d::Zero();

  Vector6d vector() const {
    Vector6d xi;
    xi << t, w;
    return xi;
  }
  static Twist from_vector(const Vector6d& xi) { return {xi.head<3>(), xi.tail<3>()}; }
  double norm() const { return vector().norm(); }
};

/// Rigid transform x -> R x + t.
class Pose {
 public:
  Pose() = default;
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose identity() { return {}; }
  /// Quaternion in (x, y, z, w) order; normalised before use.
  static Pose from_quaternion(const Eigen::Vector4d& xyzw, const Eigen::Vector3d& translation);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  /// Quaternion (x, y, z, w) with w >= 0.
  Eigen::Vector4d quaternion_xyzw() const;
  Eigen::Matrix4d matrix() const;

  Pose inverse() const;
  Pose operator*(const Pose& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& x) const { return rotation_ * x + translation_; }

  /// Rotation angle in radians.
  double rotation_angle() const;
  /// RᵀR = I and det R = +1 within `tol`.
  bool is_valid(double tol = 1e-9) const;

 private:
  Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// a u + b v + c = 0, stored with a² + b² = 1 so evaluation is a signed pixel distance.
struct HomogeneousLine2D {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;

  Eigen::Vector3d coeffs() const { return {a, b, c}; }
  Eigen::Vector2d normal() const { return {a, b}; }
  Eigen::Vector2d direction() const { return {-b, a}; }
  /// Normalises; throws DegenerateLine when (a, b) vanishes.
  static HomogeneousLine2D from_coeffs(const Eigen::Vector3d& l);
  /// Foot of the perpendicular from x.
  PixelPoint closest_point(const PixelPoint& x) const;
};

/// nᵀX + d = 0 with unit n.
struct Plane3D {
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  double d = 0.0;

  static Plane3D from_coeffs(const Eigen::Vector4d& pi);
  double signed_distance(const Eigen::Vector3d& x) const { return n.dot(x) + d; }
};

struct Line3D {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();

  static Line3D through(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
  double distance_to(const Eigen::Vector3d& x) const;
  Line3D transformed(const Pose& pose) const {
    return {pose * point, pose.rotation() * direction};
  }
};

Eigen::Matrix3d hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const Eigen::Matrix3d& m);

/// SE(3) exponential: Rodrigues rotation with the coupled translation V t.
Pose exp_map(const Twist& xi);
/// Inverse of exp_map; throws AmbiguousLog when the rotation angle is within 1e-6 of π.
Twist log_map(const Pose& pose);

/// Throws BehindCamera when Z <= 1e-9.
PixelPoint project(const CameraIntrinsics& K, const Eigen::Vector3d& X);
/// d(u, v) / d(X, Y, Z) at X.
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& K, const Eigen::Vector3d& X);
/// Point with Z = 1 / inverse_depth on the ray through x. Throws InvalidDepth when d <= 0.
Eigen::Vector3d backproject(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth);
/// Unnormalised ray K⁻¹ (u, v, 1).
Eigen::Vector3d pixel_ray(const CameraIntrinsics& K, const PixelPoint& x);

/// Maps a reference pixel with inverse depth into the current frame: the pose carries
/// reference-frame coordinates into current-frame coordinates.
PixelPoint warp(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth, const Pose& ref_to_cur);
PixelPoint warp(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth, const Twist& xi);

/// Throws DegenerateLine when the endpoints coincide.
HomogeneousLine2D line_from_endpoints(const PixelPoint& p1, const PixelPoint& p2);
double point_line_signed_distance(const HomogeneousLine2D& l, const PixelPoint& x);
/// Unsigned angle in [0, π/2] between two undirected lines.
double angle_between_lines(const HomogeneousLine2D& l1, const HomogeneousLine2D& l2);

/// Affine map taking full-resolution pixel coordinates to pyramid level `level`.
PixelPoint to_level(const PixelPoint& x, int level);
HomogeneousLine2D line_to_level(const HomogeneousLine2D& l, int level);
/// 3x3 matrix M with l_level ∝ M l (after the same normalisation as line_to_level).
Eigen::Matrix3d line_level_transform(int level);

}  // namespace edgevo
