#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "edgevo/geometry.hpp"

namespace edgevo {

struct StampedPose {
  double stamp = 0.0;  // seconds
  Pose pose;           // camera to world
};

/// Timestamped pose sequence with strictly increasing stamps.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<StampedPose> entries);

  /// Throws InvalidArgument unless the stamp exceeds the last one.
  void push_back(double stamp, const Pose& pose);

  const std::vector<StampedPose>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const StampedPose& operator[](std::size_t i) const { return entries_[i]; }

  /// Sum of distances between consecutive positions.
  double path_length() const;

 private:
  std::vector<StampedPose> entries_;
};

/// `timestamp tx ty tz qx qy qz qw` per line, '#' comments. ParseError names the line.
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::string& path);
/// 9 significant digits per field.
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
void write_trajectory(const std::string& path, const Trajectory& trajectory);

struct AssociatedPair {
  double stamp = 0.0;
  Pose gt;
  Pose est;
};

/// Nearest-stamp association, one-to-one, |Δt| <= max_gap.
std::vector<AssociatedPair> associate(const Trajectory& gt, const Trajectory& est, double max_gap = 0.02);

/// Least-squares scale s = Σ⟨q̄, b̄⟩ / Σ⟨b̄, b̄⟩ over centred associated positions; 1 when degenerate.
double estimate_scale(const Trajectory& gt, const Trajectory& est);
double estimate_scale(const std::vector<AssociatedPair>& pairs);

/// Scale of the least-squares similarity taking estimated positions onto ground truth.
double similarity_scale(const std::vector<AssociatedPair>& pairs);

enum class ScaleAlignment { Similarity, Positional, None };
ScaleAlignment parse_scale_alignment(const std::string& text);
std::string to_string(ScaleAlignment a);

struct ErrorStats {
  double rmse = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;

  static ErrorStats of(const std::vector<double>& values);
};

struct RpeReport {
  int delta = 1;
  double scale = 1.0;
  ScaleAlignment alignment = ScaleAlignment::Similarity;
  std::vector<double> stamps;                 // stamp of the first pose of each pair
  std::vector<double> translation_errors;     // scene units
  std::vector<double> translation_per_second; // scene units / s
  std::vector<double> rotation_errors_deg;
  ErrorStats translation;
  ErrorStats translation_rate;
  ErrorStats rotation;
};

/// E_i = (Q_i⁻¹ Q_{i+δ})⁻¹ (B_i⁻¹ B_{i+δ}) over associated pairs after scaling estimated
/// translations. Throws InsufficientOverlap with fewer than δ + 1 associated poses.
RpeReport rpe(const Trajectory& gt, const Trajectory& est, int delta = 1,
              ScaleAlignment alignment = ScaleAlignment::Similarity, double max_gap = 0.02);

}  // namespace edgevo
