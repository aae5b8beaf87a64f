#include "edgevo/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "edgevo/error.hpp"

namespace edgevo {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr double kMinDepth = 1e-9;

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
    throw Error(ErrorCode::InvalidArgument, "principal point outside the image");
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d CameraIntrinsics::inverse_matrix() const {
  Eigen::Matrix3d k;
  k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
  return k;
}

CameraIntrinsics CameraIntrinsics::at_level(int level) const {
  const double s = std::ldexp(1.0, level);
  CameraIntrinsics k = *this;
  k.fx = fx / s;
  k.fy = fy / s;
  k.cx = (cx + 0.5) / s - 0.5;
  k.cy = (cy + 0.5) / s - 0.5;
  k.width = width >> level;
  k.height = height >> level;
  return k;
}

Pose Pose::from_quaternion(const Eigen::Vector4d& xyzw, const Eigen::Vector3d& translation) {
  const double n = xyzw.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero quaternion");
  const Eigen::Quaterniond q(xyzw[3] / n, xyzw[0] / n, xyzw[1] / n, xyzw[2] / n);
  return {q.toRotationMatrix(), translation};
}

Eigen::Vector4d Pose::quaternion_xyzw() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  Eigen::Vector4d out(q.x(), q.y(), q.z(), q.w());
  if (out[3] < 0.0) out = -out;
  return out;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Pose Pose::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

Pose Pose::operator*(const Pose& other) const {
  return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

double Pose::rotation_angle() const {
  const double s = 0.5 * vee(rotation_ - rotation_.transpose()).norm();
  const double c = 0.5 * (rotation_.trace() - 1.0);
  return std::atan2(s, c);
}

bool Pose::is_valid(double tol) const {
  const double ortho = (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation_.determinant() - 1.0) <= tol && translation_.allFinite();
}

HomogeneousLine2D HomogeneousLine2D::from_coeffs(const Eigen::Vector3d& l) {
  const double n = std::hypot(l[0], l[1]);
  if (!(n > 1e-300) || !std::isfinite(n)) throw Error(ErrorCode::DegenerateLine, "line normal vanishes");
  return {l[0] / n, l[1] / n, l[2] / n};
}

PixelPoint HomogeneousLine2D::closest_point(const PixelPoint& x) const {
  const double dist = a * x.u + b * x.v + c;
  return {x.u - dist * a, x.v - dist * b};
}

Plane3D Plane3D::from_coeffs(const Eigen::Vector4d& pi) {
  const double n = pi.head<3>().norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "plane normal vanishes");
  return {pi.head<3>() / n, pi[3] / n};
}

Line3D Line3D::through(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d d = b - a;
  if (!(d.norm() > 0.0)) throw Error(ErrorCode::DegenerateLine, "coincident 3D points");
  return {a, d.normalized()};
}

double Line3D::distance_to(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d r = x - point;
  return (r - r.dot(direction) * direction).norm();
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Vector3d vee(const Eigen::Matrix3d& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

Pose exp_map(const Twist& xi) {
  const Eigen::Vector3d& w = xi.w;
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  const Eigen::Matrix3d W2 = W * W;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();

  Eigen::Matrix3d R;
  Eigen::Matrix3d V;
  if (theta < kSmallAngle) {
    R = I + W + 0.5 * W2;
    V = I + 0.5 * W + W2 / 6.0;
  } else {
    const double t2 = theta * theta;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    R = I + (s / theta) * W + ((1.0 - c) / t2) * W2;
    V = I + ((1.0 - c) / t2) * W + ((theta - s) / (t2 * theta)) * W2;
  }
  return {R, V * xi.t};
}

Twist log_map(const Pose& pose) {
  const Eigen::Matrix3d& R = pose.rotation();
  const Eigen::Vector3d axis2s = vee(R - R.transpose());  // 2 sin(θ) · axis
  const double s = 0.5 * axis2s.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(s, c);
  if (theta >= std::numbers::pi - 1e-6)
    throw Error(ErrorCode::AmbiguousLog, "rotation angle too close to pi");

  Eigen::Vector3d w;
  Eigen::Matrix3d V_inv;
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  if (theta < kSmallAngle) {
    w = 0.5 * axis2s;
    const Eigen::Matrix3d W = hat(w);
    V_inv = I - 0.5 * W + (W * W) / 12.0;
  } else {
    w = (theta / (2.0 * s)) * axis2s;
    const Eigen::Matrix3d W = hat(w);
    const double t2 = theta * theta;
    const double coef = (1.0 - (theta * std::sin(theta)) / (2.0 * (1.0 - std::cos(theta)))) / t2;
    V_inv = I - 0.5 * W + coef * (W * W);
  }
  return {V_inv * pose.translation(), w};
}

PixelPoint project(const CameraIntrinsics& K, const Eigen::Vector3d& X) {
  if (!(X.z() > kMinDepth)) throw Error(ErrorCode::BehindCamera, "point has non-positive depth");
  return {K.fx * X.x() / X.z() + K.cx, K.fy * X.y() / X.z() + K.cy};
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& K, const Eigen::Vector3d& X) {
  const double iz = 1.0 / X.z();
  const double iz2 = iz * iz;
  Eigen::Matrix<double, 2, 3> J;
  J << K.fx * iz, 0.0, -K.fx * X.x() * iz2, 0.0, K.fy * iz, -K.fy * X.y() * iz2;
  return J;
}

Eigen::Vector3d pixel_ray(const CameraIntrinsics& K, const PixelPoint& x) {
  return {(x.u - K.cx) / K.fx, (x.v - K.cy) / K.fy, 1.0};
}

Eigen::Vector3d backproject(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth) {
  if (!(inverse_depth > 0.0)) throw Error(ErrorCode::InvalidDepth, "inverse depth must be positive");
  return pixel_ray(K, x) / inverse_depth;
}

PixelPoint warp(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth, const Pose& ref_to_cur) {
  return project(K, ref_to_cur * backproject(K, x, inverse_depth));
}

PixelPoint warp(const CameraIntrinsics& K, const PixelPoint& x, double inverse_depth, const Twist& xi) {
  return warp(K, x, inverse_depth, exp_map(xi));
}

HomogeneousLine2D line_from_endpoints(const PixelPoint& p1, const PixelPoint& p2) {
  if (p1.u == p2.u && p1.v == p2.v) throw Error(ErrorCode::DegenerateLine, "coincident endpoints");
  return HomogeneousLine2D::from_coeffs(p1.homogeneous().cross(p2.homogeneous()));
}

double point_line_signed_distance(const HomogeneousLine2D& l, const PixelPoint& x) {
  return l.a * x.u + l.b * x.v + l.c;
}

double angle_between_lines(const HomogeneousLine2D& l1, const HomogeneousLine2D& l2) {
  const double cross = std::abs(l1.a * l2.b - l1.b * l2.a);
  const double dot = std::abs(l1.a * l2.a + l1.b * l2.b);
  return std::atan2(cross, dot);
}

PixelPoint to_level(const PixelPoint& x, int level) {
  const double s = std::ldexp(1.0, level);
  return {(x.u + 0.5) / s - 0.5, (x.v + 0.5) / s - 0.5};
}

Eigen::Matrix3d line_level_transform(int level) {
  const double s = std::ldexp(1.0, level);
  const double h = 0.5 * s - 0.5;
  Eigen::Matrix3d M;
  M << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, h / s, h / s, 1.0 / s;
  return M;
}

HomogeneousLine2D line_to_level(const HomogeneousLine2D& l, int level) {
  const Eigen::Vector3d m = line_level_transform(level) * l.coeffs();
  return {m[0], m[1], m[2]};
}

}  // namespace edgevo
