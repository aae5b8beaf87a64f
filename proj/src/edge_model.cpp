#include "edgevo/edge_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "edgevo/error.hpp"

namespace edgevo {

namespace {

double wrap_pi(double angle) {
  double a = std::fmod(angle, std::numbers::pi);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

double orientation_difference(double a, double b) {
  const double d = std::abs(wrap_pi(a) - wrap_pi(b));
  return std::min(d, std::numbers::pi - d);
}

// Interval gap of `b` projected onto the direction of `a`; negative when they overlap.
double projected_gap(const LineSegment2D& a, const LineSegment2D& b) {
  const Eigen::Vector2d dir = a.unit_direction();
  const Eigen::Vector2d origin = a.p1.vec();
  const double a0 = 0.0;
  const double a1 = (a.p2.vec() - origin).dot(dir);
  const double b0 = (b.p1.vec() - origin).dot(dir);
  const double b1 = (b.p2.vec() - origin).dot(dir);
  const double lo = std::max(std::min(a0, a1), std::min(b0, b1));
  const double hi = std::min(std::max(a0, a1), std::max(b0, b1));
  return lo - hi;
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
  std::vector<std::size_t> parent;
};

LineSegment2D refit_group(const std::vector<const LineSegment2D*>& members) {
  const LineSegment2D* lead = *std::min_element(
      members.begin(), members.end(), [](const auto* x, const auto* y) { return x->id < y->id; });

  double total_weight = 0.0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto* s : members) {
    const double w = std::max(s->length(), 1e-9);
    centroid += w * (s->p1.vec() + s->p2.vec());
    total_weight += 2.0 * w;
  }
  centroid /= total_weight;

  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto* s : members) {
    const double w = std::max(s->length(), 1e-9);
    for (const auto& p : {s->p1.vec(), s->p2.vec()}) {
      const Eigen::Vector2d r = p - centroid;
      scatter += w * r * r.transpose();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
  Eigen::Vector2d dir = eig.eigenvectors().col(1);
  if (dir.dot(lead->unit_direction()) < 0.0) dir = -dir;

  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -std::numeric_limits<double>::infinity();
  int level = lead->pyramid_level;
  for (const auto* s : members) {
    for (const auto& p : {s->p1.vec(), s->p2.vec()}) {
      const double t = (p - centroid).dot(dir);
      t_min = std::min(t_min, t);
      t_max = std::max(t_max, t);
    }
    level = std::min(level, s->pyramid_level);
  }
  return LineSegment2D::make(lead->id, PixelPoint::from(centroid + t_min * dir),
                             PixelPoint::from(centroid + t_max * dir), level);
}

std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs(const std::vector<LineSegment2D>& segs,
                                                                 const MergeParams& params) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (!params.use_buckets) {
    for (std::size_t i = 0; i < segs.size(); ++i)
      for (std::size_t j = i + 1; j < segs.size(); ++j) pairs.emplace_back(i, j);
    return pairs;
  }
  BucketGrid grid(segs, params.cell_size, params.angle_bins);
  double max_length = 0.0;
  for (const auto& s : segs) max_length = std::max(max_length, s.length());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    // A mergeable partner's midpoint is at most this far away.
    const double reach = 0.5 * segs[i].length() + 0.5 * max_length + params.gap_tol + params.offset_tol;
    for (std::size_t j : grid.neighbors(segs[i].midpoint(), segs[i].orientation(), reach, params.angle_tol))
      if (j > i) pairs.emplace_back(i, j);
  }
  return pairs;
}

}  // namespace

LineSegment2D LineSegment2D::make(int id, const PixelPoint& p1, const PixelPoint& p2, int pyramid_level) {
  LineSegment2D s;
  s.id = id;
  s.p1 = p1;
  s.p2 = p2;
  s.line = line_from_endpoints(p1, p2);
  s.pyramid_level = pyramid_level;
  return s;
}

double LineSegment2D::orientation() const { return wrap_pi(std::atan2(p2.v - p1.v, p2.u - p1.u)); }

BucketGrid::BucketGrid(double cell_size, int angle_bins) : cell_size_(cell_size), angle_bins_(angle_bins) {
  if (!(cell_size > 0.0) || angle_bins < 1) throw Error(ErrorCode::InvalidArgument, "invalid bucket grid");
}

BucketGrid::BucketGrid(const std::vector<LineSegment2D>& segments, double cell_size, int angle_bins)
    : BucketGrid(cell_size, angle_bins) {
  for (std::size_t i = 0; i < segments.size(); ++i) insert(segments[i], i);
}

std::tuple<int, int, int> BucketGrid::key(const PixelPoint& midpoint, double orientation) const {
  const int cx = static_cast<int>(std::floor(midpoint.u / cell_size_));
  const int cy = static_cast<int>(std::floor(midpoint.v / cell_size_));
  int bin = static_cast<int>(std::floor(wrap_pi(orientation) / std::numbers::pi * angle_bins_));
  bin = std::clamp(bin, 0, angle_bins_ - 1);
  return {cx, cy, bin};
}

void BucketGrid::insert(const LineSegment2D& segment, std::size_t position) {
  cells_[key(segment.midpoint(), segment.orientation())].push_back(position);
  ++count_;
}

std::vector<std::size_t> BucketGrid::neighbors(const PixelPoint& midpoint, double orientation, double radius_px,
                                               double angle_tol) const {
  const auto [cx, cy, bin] = key(midpoint, orientation);
  const int r = static_cast<int>(std::floor(radius_px / cell_size_)) + 1;
  const double bin_width = std::numbers::pi / angle_bins_;
  const int nb = std::min(angle_bins_ / 2, static_cast<int>(std::ceil(angle_tol / bin_width)));
  std::set<int> bins;
  for (int db = -nb; db <= nb; ++db) bins.insert(((bin + db) % angle_bins_ + angle_bins_) % angle_bins_);

  std::vector<std::size_t> out;
  for (int y = cy - r; y <= cy + r; ++y) {
    for (int x = cx - r; x <= cx + r; ++x) {
      for (int b : bins) {
        const auto it = cells_.find({x, y, b});
        if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool mergeable(const LineSegment2D& a, const LineSegment2D& b, const MergeParams& params) {
  if (orientation_difference(a.orientation(), b.orientation()) > params.angle_tol) return false;
  // Perpendicular offset at the junction, between the closest pair of endpoints. Measuring at
  // the far ends would extrapolate each line's angular jitter across the other segment.
  const PixelPoint* ja = &a.p1;
  const PixelPoint* jb = &b.p1;
  double best = std::numeric_limits<double>::infinity();
  for (const PixelPoint* pa : {&a.p1, &a.p2})
    for (const PixelPoint* pb : {&b.p1, &b.p2})
      if (const double d = (pa->vec() - pb->vec()).norm(); d < best) {
        best = d;
        ja = pa;
        jb = pb;
      }
  const double offset = std::max(std::abs(point_line_signed_distance(a.line, *jb)),
                                 std::abs(point_line_signed_distance(b.line, *ja)));
  if (offset > params.offset_tol) return false;
  return std::max(projected_gap(a, b), projected_gap(b, a)) <= params.gap_tol;
}

std::vector<LineSegment2D> merge_segments(const std::vector<LineSegment2D>& segments, const MergeParams& params) {
  std::vector<LineSegment2D> current = segments;
  for (;;) {
    UnionFind uf(current.size());
    bool merged = false;
    for (const auto& [i, j] : candidate_pairs(current, params))
      if (mergeable(current[i], current[j], params)) merged |= uf.unite(i, j);

    if (!merged) break;

    std::map<std::size_t, std::vector<const LineSegment2D*>> groups;
    for (std::size_t i = 0; i < current.size(); ++i) groups[uf.find(i)].push_back(&current[i]);
    std::vector<LineSegment2D> next;
    next.reserve(groups.size());
    for (const auto& [root, members] : groups) {
      if (members.size() == 1) {
        next.push_back(*members.front());
      } else {
        next.push_back(refit_group(members));
      }
    }
    current = std::move(next);
  }
  std::sort(current.begin(), current.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  return current;
}

std::vector<LineSegment2D> remove_short_segments(const std::vector<LineSegment2D>& segments, double min_length) {
  std::vector<LineSegment2D> out;
  std::copy_if(segments.begin(), segments.end(), std::back_inserter(out),
               [&](const auto& s) { return s.length() >= min_length; });
  return out;
}

std::vector<PixelIndex> trace_pixels(const LineSegment2D& segment, int expand) {
  const double du = segment.p2.u - segment.p1.u;
  const double dv = segment.p2.v - segment.p1.v;
  const bool horizontal = std::abs(du) >= std::abs(dv);
  const int steps = static_cast<int>(std::ceil(std::max(std::abs(du), std::abs(dv))));

  std::vector<PixelIndex> out;
  std::set<PixelIndex> seen;
  auto add = [&](PixelIndex p) {
    if (seen.insert(p).second) out.push_back(p);
  };
  for (int i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / steps;
    const PixelIndex p{static_cast<int>(std::lround(segment.p1.u + t * du)),
                       static_cast<int>(std::lround(segment.p1.v + t * dv))};
    add(p);
    for (int k = 1; k <= expand; ++k) {
      if (horizontal) {
        add({p.x, p.y - k});
        add({p.x, p.y + k});
      } else {
        add({p.x - k, p.y});
        add({p.x + k, p.y});
      }
    }
  }
  return out;
}

LineSegment2D with_traced_pixels(const LineSegment2D& segment, int expand, int width, int height) {
  LineSegment2D out = segment;
  out.pixels.clear();
  for (const auto& p : trace_pixels(segment, expand))
    if (p.x >= 0 && p.y >= 0 && p.x < width && p.y < height) out.pixels.push_back(p);
  return out;
}

std::vector<EdgeMatch> match_edges(const std::vector<LineSegment2D>& ref, const std::vector<LineSegment2D>& cur,
                                   MatchMode mode, const MatchParams& params) {
  std::vector<EdgeMatch> matches;
  if (mode == MatchMode::GroundTruth) {
    std::unordered_map<int, int> cur_ids;
    for (const auto& c : cur) cur_ids.emplace(c.id, c.id);
    std::set<int> used;
    for (const auto& r : ref) {
      if (cur_ids.count(r.id) && used.insert(r.id).second) matches.push_back({r.id, r.id, 0.0});
    }
    std::sort(matches.begin(), matches.end(), [](const auto& x, const auto& y) { return x.ref_id < y.ref_id; });
    return matches;
  }

  const auto score = [&](const LineSegment2D& r, const LineSegment2D& c) -> std::optional<double> {
    const double dangle = orientation_difference(r.orientation(), c.orientation());
    if (dangle > params.max_angle_diff) return std::nullopt;
    const double dmid = (r.midpoint().vec() - c.midpoint().vec()).norm();
    if (dmid > params.max_midpoint_distance) return std::nullopt;
    const double lr = std::max(r.length(), c.length()) / std::max(std::min(r.length(), c.length()), 1e-9);
    if (lr > params.max_length_ratio) return std::nullopt;
    return dmid + params.angle_weight * dangle * 180.0 / std::numbers::pi +
           params.length_weight * std::abs(r.length() - c.length());
  };

  // Best candidate per side; strict improvement or equal score with a lower id wins.
  const auto better = [](double s, int id, double best_s, int best_id) {
    return s < best_s || (s == best_s && id < best_id);
  };

  const BucketGrid cur_grid(cur, params.cell_size, params.angle_bins);
  const BucketGrid ref_grid(ref, params.cell_size, params.angle_bins);

  std::vector<std::ptrdiff_t> best_for_ref(ref.size(), -1);
  std::vector<double> best_ref_score(ref.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j : cur_grid.neighbors(ref[i].midpoint(), ref[i].orientation(), params.max_midpoint_distance,
                                            params.max_angle_diff)) {
      const auto s = score(ref[i], cur[j]);
      if (!s) continue;
      const int best_id = best_for_ref[i] < 0 ? std::numeric_limits<int>::max() : cur[best_for_ref[i]].id;
      if (better(*s, cur[j].id, best_ref_score[i], best_id)) {
        best_ref_score[i] = *s;
        best_for_ref[i] = static_cast<std::ptrdiff_t>(j);
      }
    }
  }
  std::vector<std::ptrdiff_t> best_for_cur(cur.size(), -1);
  std::vector<double> best_cur_score(cur.size(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < cur.size(); ++j) {
    for (std::size_t i : ref_grid.neighbors(cur[j].midpoint(), cur[j].orientation(), params.max_midpoint_distance,
                                            params.max_angle_diff)) {
      const auto s = score(ref[i], cur[j]);
      if (!s) continue;
      const int best_id = best_for_cur[j] < 0 ? std::numeric_limits<int>::max() : ref[best_for_cur[j]].id;
      if (better(*s, ref[i].id, best_cur_score[j], best_id)) {
        best_cur_score[j] = *s;
        best_for_cur[j] = static_cast<std::ptrdiff_t>(i);
      }
    }
  }
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const auto j = best_for_ref[i];
    if (j >= 0 && best_for_cur[static_cast<std::size_t>(j)] == static_cast<std::ptrdiff_t>(i))
      matches.push_back({ref[i].id, cur[static_cast<std::size_t>(j)].id, best_ref_score[i]});
  }
  std::sort(matches.begin(), matches.end(), [](const auto& x, const auto& y) { return x.ref_id < y.ref_id; });
  return matches;
}

MatchMode parse_match_mode(const std::string& text) {
  if (text == "gt") return MatchMode::GroundTruth;
  if (text == "geometric") return MatchMode::Geometric;
  throw Error(ErrorCode::InvalidArgument, "unknown match mode '" + text + "' (expected gt|geometric)");
}

std::vector<LineSegment2D> read_segments(std::istream& in) {
  std::vector<LineSegment2D> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string probe;
    if (!(ss >> probe)) continue;
    ss.clear();
    ss.seekg(0);
    int id = 0;
    int level = 0;
    double x1, y1, x2, y2;
    std::string extra;
    if (!(ss >> id >> x1 >> y1 >> x2 >> y2 >> level) || (ss >> extra))
      throw Error(ErrorCode::ParseError, "segment record malformed at line " + std::to_string(line_no));
    try {
      out.push_back(LineSegment2D::make(id, {x1, y1}, {x2, y2}, level));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "degenerate segment at line " + std::to_string(line_no));
    }
  }
  return out;
}

std::vector<LineSegment2D> read_segments_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_segments(in);
}

void write_segments(std::ostream& out, const std::vector<LineSegment2D>& segments) {
  out << std::setprecision(10);
  for (const auto& s : segments)
    out << s.id << ' ' << s.p1.u << ' ' << s.p1.v << ' ' << s.p2.u << ' ' << s.p2.v << ' ' << s.pyramid_level
        << '\n';
}

}  // namespace edgevo
