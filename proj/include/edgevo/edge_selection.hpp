#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "edgevo/edge_model.hpp"

namespace edgevo {

/// Candidate edges V and the image width bounding the coverage columns.
struct GroundSet {
  std::vector<LineSegment2D> edges;
  int image_width = 0;

  /// Throws InvalidElement on duplicate ids.
  void validate() const;
  const LineSegment2D& edge(int id) const;
};

/// Edges whose horizontal extents overlap by at least the threshold; e1 < e2.
struct ConflictPair {
  int e1 = 0;
  int e2 = 0;
  double overlap = 0.0;

  friend bool operator==(const ConflictPair&, const ConflictPair&) = default;
};

struct SelectionResult {
  std::set<int> selected;
  long score = 0;
  std::vector<long> gain_trace;
};

using EdgeFilter = std::function<bool(const LineSegment2D&)>;

/// Inclusive integer column range covered by an edge, clipped to the image.
struct ColumnRange {
  int first = 0;
  int last = -1;
  int count() const { return last >= first ? last - first + 1 : 0; }
};
ColumnRange column_range(const LineSegment2D& edge, int image_width);

/// Number of image columns intersected by at least one selected edge.
long coverage_score(const std::set<int>& selected, const GroundSet& ground);
/// F(S ∪ {e}) − F(S).
long marginal_gain(int edge_id, const std::set<int>& selected, const GroundSet& ground);

/// Intersection over the shorter of the two column extents.
double horizontal_overlap(const LineSegment2D& a, const LineSegment2D& b, int image_width);
std::vector<ConflictPair> find_conflicts(const GroundSet& ground, double overlap_threshold = 0.5);

/// True iff no conflict pair has both members in `selected`.
bool is_feasible(const std::set<int>& selected, const std::vector<ConflictPair>& conflicts);

/// Greedy maximisation of coverage under the conflict constraints. The optional filter
/// removes elements before selection starts.
SelectionResult greedy_select(const GroundSet& ground, const std::vector<ConflictPair>& conflicts,
                              const EdgeFilter& prefilter = {});

/// Exact optimum by enumerating feasible subsets; throws TooLarge when |V| > 20.
SelectionResult brute_force_optimum(const GroundSet& ground, const std::vector<ConflictPair>& conflicts);

/// Text records `id1 id2 overlap`; pairs are canonicalised to id1 < id2.
std::vector<ConflictPair> read_conflicts(std::istream& in);
std::vector<ConflictPair> read_conflicts_file(const std::string& path);
void write_conflicts(std::ostream& out, const std::vector<ConflictPair>& conflicts);

}  // namespace edgevo
