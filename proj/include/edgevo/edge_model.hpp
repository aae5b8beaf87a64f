#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "edgevo/geometry.hpp"
#include "edgevo/image.hpp"

namespace edgevo {

/// A detected 2D edge: endpoints, normalised line and the pixels traced along it.
struct LineSegment2D {
  int id = 0;
  PixelPoint p1;
  PixelPoint p2;
  HomogeneousLine2D line;
  std::vector<PixelIndex> pixels;
  int pyramid_level = 0;

  /// Builds the segment and its line; throws DegenerateLine for coincident endpoints.
  static LineSegment2D make(int id, const PixelPoint& p1, const PixelPoint& p2, int pyramid_level = 0);

  double length() const { return (p2.vec() - p1.vec()).norm(); }
  PixelPoint midpoint() const { return {0.5 * (p1.u + p2.u), 0.5 * (p1.v + p2.v)}; }
  /// Undirected orientation in [0, π).
  double orientation() const;
  Eigen::Vector2d unit_direction() const { return (p2.vec() - p1.vec()).normalized(); }
};

struct EdgeMatch {
  int ref_id = 0;
  int cur_id = 0;
  double score = 0.0;

  friend bool operator==(const EdgeMatch&, const EdgeMatch&) = default;
};

/// Segments bucketed by midpoint cell and orientation bin; stores positions into the
/// segment list it was built from.
class BucketGrid {
 public:
  BucketGrid(double cell_size, int angle_bins);
  explicit BucketGrid(const std::vector<LineSegment2D>& segments, double cell_size = 32.0, int angle_bins = 12);

  void insert(const LineSegment2D& segment, std::size_t position);

  /// Positions of segments whose midpoint cell is within `radius_px` (cell-rounded, so a
  /// superset) and whose orientation bin is within the bins covering `angle_tol`.
  std::vector<std::size_t> neighbors(const PixelPoint& midpoint, double orientation, double radius_px,
                                     double angle_tol) const;

  std::size_t size() const { return count_; }
  double cell_size() const { return cell_size_; }
  int angle_bins() const { return angle_bins_; }
  const std::map<std::tuple<int, int, int>, std::vector<std::size_t>>& cells() const { return cells_; }

  std::tuple<int, int, int> key(const PixelPoint& midpoint, double orientation) const;

 private:
  double cell_size_;
  int angle_bins_;
  std::size_t count_ = 0;
  std::map<std::tuple<int, int, int>, std::vector<std::size_t>> cells_;
};

struct MergeParams {
  double angle_tol = 5.0 * std::numbers::pi / 180.0;
  double gap_tol = 3.0;
  double offset_tol = 2.0;
  bool use_buckets = true;
  double cell_size = 32.0;
  int angle_bins = 12;
};

/// Pairwise merge test used by merge_segments (symmetric in its arguments).
bool mergeable(const LineSegment2D& a, const LineSegment2D& b, const MergeParams& params);

/// Merges broken segments until no pair satisfies `mergeable`. Each group is refit by a
/// length-weighted total least squares line through its endpoints; the merged endpoints are
/// the extreme projections. The merged segment keeps the smallest id of its group. Output is
/// sorted by id and carries no traced pixels.
std::vector<LineSegment2D> merge_segments(const std::vector<LineSegment2D>& segments,
                                          const MergeParams& params = {});

std::vector<LineSegment2D> remove_short_segments(const std::vector<LineSegment2D>& segments, double min_length);

/// Raster pixels along the segment plus `expand` pixels on each side across the minor axis.
std::vector<PixelIndex> trace_pixels(const LineSegment2D& segment, int expand);

/// Copy of the segment with traced pixels clipped to a width x height image.
LineSegment2D with_traced_pixels(const LineSegment2D& segment, int expand, int width, int height);

enum class MatchMode { GroundTruth, Geometric };

struct MatchParams {
  double max_angle_diff = 10.0 * std::numbers::pi / 180.0;
  double max_midpoint_distance = 40.0;
  double max_length_ratio = 2.5;
  double angle_weight = 2.0;   // score units per degree
  double length_weight = 0.5;  // score units per pixel of length difference
  double cell_size = 32.0;
  int angle_bins = 12;
};

/// Ground-truth mode joins on id. Geometric mode matches nearest neighbours in
/// (orientation, midpoint, length) with mutual-best filtering; ties go to the lowest id.
std::vector<EdgeMatch> match_edges(const std::vector<LineSegment2D>& ref, const std::vector<LineSegment2D>& cur,
                                   MatchMode mode, const MatchParams& params = {});

MatchMode parse_match_mode(const std::string& text);

/// Text records `id x1 y1 x2 y2 level`, one per line; '#' starts a comment.
std::vector<LineSegment2D> read_segments(std::istream& in);
std::vector<LineSegment2D> read_segments_file(const std::string& path);
void write_segments(std::ostream& out, const std::vector<LineSegment2D>& segments);

}  // namespace edgevo
