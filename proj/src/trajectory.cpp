#include "edgevo/trajectory.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "edgevo/error.hpp"

namespace edgevo {

Trajectory::Trajectory(std::vector<StampedPose> entries) {
  for (const auto& e : entries) push_back(e.stamp, e.pose);
}

void Trajectory::push_back(double stamp, const Pose& pose) {
  if (!std::isfinite(stamp)) throw Error(ErrorCode::InvalidArgument, "non-finite timestamp");
  if (!entries_.empty() && !(stamp > entries_.back().stamp))
    throw Error(ErrorCode::InvalidArgument, "timestamps must increase strictly");
  entries_.push_back({stamp, pose});
}

double Trajectory::path_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < entries_.size(); ++i)
    total += (entries_[i].pose.translation() - entries_[i - 1].pose.translation()).norm();
  return total;
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory traj;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<double> f;
    std::string tok;
    bool bad = false;
    while (ss >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || !std::isfinite(v)) bad = true;
      f.push_back(v);
    }
    if (f.empty() && !bad) continue;
    const auto where = " at line " + std::to_string(line_no);
    if (bad || f.size() != 8) throw Error(ErrorCode::ParseError, "expected 8 numeric fields" + where);
    const Eigen::Vector4d q(f[4], f[5], f[6], f[7]);
    if (q.norm() < 1e-12) throw Error(ErrorCode::ParseError, "zero quaternion" + where);
    if (!traj.empty() && !(f[0] > traj.entries().back().stamp))
      throw Error(ErrorCode::ParseError, "timestamps not strictly increasing" + where);
    traj.push_back(f[0], Pose::from_quaternion(q, {f[1], f[2], f[3]}));
  }
  return traj;
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_trajectory(in);
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  char buf[256];
  for (const auto& e : trajectory.entries()) {
    const Eigen::Vector3d& t = e.pose.translation();
    const Eigen::Vector4d q = e.pose.quaternion_xyzw();
    // printf keeps the output independent of stream state and locale.
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n", e.stamp, t.x(), t.y(), t.z(), q[0],
                  q[1], q[2], q[3]);
    out << buf;
  }
}

void write_trajectory(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "# timestamp tx ty tz qx qy qz qw\n";
  write_trajectory(out, trajectory);
}

std::vector<AssociatedPair> associate(const Trajectory& gt, const Trajectory& est, double max_gap) {
  std::vector<AssociatedPair> pairs;
  if (gt.empty()) return pairs;
  std::size_t j = 0;
  std::size_t last_used = gt.size();
  for (const auto& e : est.entries()) {
    while (j + 1 < gt.size() && std::abs(gt[j + 1].stamp - e.stamp) <= std::abs(gt[j].stamp - e.stamp)) ++j;
    if (std::abs(gt[j].stamp - e.stamp) > max_gap || j == last_used) continue;
    pairs.push_back({e.stamp, gt[j].pose, e.pose});
    last_used = j;
  }
  return pairs;
}

double estimate_scale(const std::vector<AssociatedPair>& pairs) {
  if (pairs.size() < 2) return 1.0;
  Eigen::Vector3d qm = Eigen::Vector3d::Zero(), bm = Eigen::Vector3d::Zero();
  for (const auto& p : pairs) {
    qm += p.gt.translation();
    bm += p.est.translation();
  }
  qm /= static_cast<double>(pairs.size());
  bm /= static_cast<double>(pairs.size());
  double num = 0.0, den = 0.0;
  for (const auto& p : pairs) {
    const Eigen::Vector3d q = p.gt.translation() - qm;
    const Eigen::Vector3d b = p.est.translation() - bm;
    num += q.dot(b);
    den += b.dot(b);
  }
  return den > 1e-18 ? num / den : 1.0;
}

double estimate_scale(const Trajectory& gt, const Trajectory& est) { return estimate_scale(associate(gt, est)); }

double similarity_scale(const std::vector<AssociatedPair>& pairs) {
  if (pairs.size() < 2) return 1.0;
  Eigen::Matrix3Xd src(3, static_cast<Eigen::Index>(pairs.size()));
  Eigen::Matrix3Xd dst(3, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    src.col(static_cast<Eigen::Index>(i)) = pairs[i].est.translation();
    dst.col(static_cast<Eigen::Index>(i)) = pairs[i].gt.translation();
  }
  const Eigen::Vector3d mean = src.rowwise().mean();
  if ((src.colwise() - mean).squaredNorm() < 1e-18) return 1.0;
  // Identical point sets: the SVD would return 1 only up to rounding.
  if (src == dst) return 1.0;
  const Eigen::Matrix4d T = Eigen::umeyama(src, dst, true);
  return T.block<3, 1>(0, 0).norm();
}

ScaleAlignment parse_scale_alignment(const std::string& text) {
  if (text == "similarity") return ScaleAlignment::Similarity;
  if (text == "positional") return ScaleAlignment::Positional;
  if (text == "none") return ScaleAlignment::None;
  throw Error(ErrorCode::InvalidArgument, "unknown scale alignment '" + text + "'");
}

std::string to_string(ScaleAlignment a) {
  switch (a) {
    case ScaleAlignment::Similarity: return "similarity";
    case ScaleAlignment::Positional: return "positional";
    case ScaleAlignment::None: return "none";
  }
  return "none";
}

ErrorStats ErrorStats::of(const std::vector<double>& values) {
  ErrorStats s;
  if (values.empty()) return s;
  double sq = 0.0, sum = 0.0;
  for (double v : values) {
    sq += v * v;
    sum += v;
    s.max = std::max(s.max, v);
  }
  const auto n = static_cast<double>(values.size());
  s.rmse = std::sqrt(sq / n);
  s.mean = sum / n;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  return s;
}

RpeReport rpe(const Trajectory& gt, const Trajectory& est, int delta, ScaleAlignment alignment, double max_gap) {
  if (delta < 1) throw Error(ErrorCode::InvalidArgument, "delta must be at least 1");
  const auto pairs = associate(gt, est, max_gap);
  if (pairs.size() < static_cast<std::size_t>(delta) + 1)
    throw Error(ErrorCode::InsufficientOverlap, std::to_string(pairs.size()) + " associated poses for delta " +
                                                    std::to_string(delta));
  RpeReport report;
  report.delta = delta;
  report.alignment = alignment;
  switch (alignment) {
    case ScaleAlignment::Similarity: report.scale = similarity_scale(pairs); break;
    case ScaleAlignment::Positional: report.scale = estimate_scale(pairs); break;
    case ScaleAlignment::None: report.scale = 1.0; break;
  }
  const auto scaled = [&](const Pose& p) { return Pose(p.rotation(), report.scale * p.translation()); };

  for (std::size_t i = 0; i + static_cast<std::size_t>(delta) < pairs.size(); ++i) {
    const auto& a = pairs[i];
    const auto& b = pairs[i + static_cast<std::size_t>(delta)];
    const Pose gt_rel = a.gt.inverse() * b.gt;
    const Pose est_rel = scaled(a.est).inverse() * scaled(b.est);
    // E = gt_rel⁻¹ · est_rel, evaluated from the differences of the two motions so that equal
    // motions give exactly zero. ‖R_e − R_g‖_F = 2√2 sin(θ/2) for the angle θ of rot(E).
    const double t_err = (gt_rel.rotation().transpose() * (est_rel.translation() - gt_rel.translation())).norm();
    const double chord = (est_rel.rotation() - gt_rel.rotation()).norm() / (2.0 * std::numbers::sqrt2);
    const double angle = 2.0 * std::asin(std::min(1.0, chord));
    const double dt = b.stamp - a.stamp;
    report.stamps.push_back(a.stamp);
    report.translation_errors.push_back(t_err);
    report.translation_per_second.push_back(t_err / dt);
    report.rotation_errors_deg.push_back(angle * 180.0 / std::numbers::pi);
  }
  report.translation = ErrorStats::of(report.translation_errors);
  report.translation_rate = ErrorStats::of(report.translation_per_second);
  report.rotation = ErrorStats::of(report.rotation_errors_deg);
  return report;
}

}  // namespace edgevo
