#include "edgevo/edge_selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "edgevo/error.hpp"

namespace edgevo {

namespace {

std::vector<char> covered_columns(const std::set<int>& selected, const GroundSet& ground) {
  std::vector<char> covered(static_cast<std::size_t>(std::max(ground.image_width, 0)), 0);
  for (int id : selected) {
    const auto r = column_range(ground.edge(id), ground.image_width);
    for (int c = r.first; c <= r.last; ++c) covered[static_cast<std::size_t>(c)] = 1;
  }
  return covered;
}

}  // namespace

void GroundSet::validate() const {
  std::set<int> ids;
  for (const auto& e : edges)
    if (!ids.insert(e.id).second) throw Error(ErrorCode::InvalidElement, "duplicate edge id " + std::to_string(e.id));
}

const LineSegment2D& GroundSet::edge(int id) const {
  for (const auto& e : edges)
    if (e.id == id) return e;
  throw Error(ErrorCode::InvalidElement, "unknown edge id " + std::to_string(id));
}

ColumnRange column_range(const LineSegment2D& edge, int image_width) {
  const double lo = std::min(edge.p1.u, edge.p2.u);
  const double hi = std::max(edge.p1.u, edge.p2.u);
  ColumnRange r;
  r.first = std::max(0, static_cast<int>(std::floor(lo)));
  r.last = std::min(image_width - 1, static_cast<int>(std::floor(hi)));
  return r;
}

long coverage_score(const std::set<int>& selected, const GroundSet& ground) {
  const auto covered = covered_columns(selected, ground);
  return static_cast<long>(std::count(covered.begin(), covered.end(), 1));
}

long marginal_gain(int edge_id, const std::set<int>& selected, const GroundSet& ground) {
  const auto r = column_range(ground.edge(edge_id), ground.image_width);
  const auto covered = covered_columns(selected, ground);
  long gain = 0;
  for (int c = r.first; c <= r.last; ++c) gain += covered[static_cast<std::size_t>(c)] ? 0 : 1;
  return gain;
}

double horizontal_overlap(const LineSegment2D& a, const LineSegment2D& b, int image_width) {
  const auto ra = column_range(a, image_width);
  const auto rb = column_range(b, image_width);
  const int shorter = std::min(ra.count(), rb.count());
  if (shorter == 0) return 0.0;
  const int inter = std::max(0, std::min(ra.last, rb.last) - std::max(ra.first, rb.first) + 1);
  return static_cast<double>(inter) / shorter;
}

std::vector<ConflictPair> find_conflicts(const GroundSet& ground, double overlap_threshold) {
  std::vector<ConflictPair> out;
  for (std::size_t i = 0; i < ground.edges.size(); ++i) {
    for (std::size_t j = i + 1; j < ground.edges.size(); ++j) {
      const double o = horizontal_overlap(ground.edges[i], ground.edges[j], ground.image_width);
      if (o >= overlap_threshold) {
        const int a = std::min(ground.edges[i].id, ground.edges[j].id);
        const int b = std::max(ground.edges[i].id, ground.edges[j].id);
        out.push_back({a, b, o});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return std::tie(x.e1, x.e2) < std::tie(y.e1, y.e2); });
  return out;
}

bool is_feasible(const std::set<int>& selected, const std::vector<ConflictPair>& conflicts) {
  return std::none_of(conflicts.begin(), conflicts.end(),
                      [&](const ConflictPair& c) { return selected.count(c.e1) && selected.count(c.e2); });
}

SelectionResult greedy_select(const GroundSet& ground, const std::vector<ConflictPair>& conflicts,
                              const EdgeFilter& prefilter) {
  ground.validate();
  std::vector<int> candidates;
  for (const auto& e : ground.edges)
    if (!prefilter || prefilter(e)) candidates.push_back(e.id);
  std::sort(candidates.begin(), candidates.end());

  std::unordered_map<int, std::vector<int>> partners;
  for (const auto& c : conflicts) {
    partners[c.e1].push_back(c.e2);
    partners[c.e2].push_back(c.e1);
  }

  SelectionResult result;
  std::vector<char> covered(static_cast<std::size_t>(std::max(ground.image_width, 0)), 0);
  std::set<int> blocked;
  for (;;) {
    int best = -1;
    long best_gain = 0;
    for (int id : candidates) {
      if (result.selected.count(id) || blocked.count(id)) continue;
      const auto r = column_range(ground.edge(id), ground.image_width);
      long gain = 0;
      for (int c = r.first; c <= r.last; ++c) gain += covered[static_cast<std::size_t>(c)] ? 0 : 1;
      if (gain > best_gain) {  // candidates ascend, so ties keep the lowest id
        best_gain = gain;
        best = id;
      }
    }
    if (best < 0) break;
    result.selected.insert(best);
    result.gain_trace.push_back(best_gain);
    result.score += best_gain;
    const auto r = column_range(ground.edge(best), ground.image_width);
    for (int c = r.first; c <= r.last; ++c) covered[static_cast<std::size_t>(c)] = 1;
    if (const auto it = partners.find(best); it != partners.end()) blocked.insert(it->second.begin(), it->second.end());
  }
  return result;
}

SelectionResult brute_force_optimum(const GroundSet& ground, const std::vector<ConflictPair>& conflicts) {
  ground.validate();
  const std::size_t n = ground.edges.size();
  if (n > 20) throw Error(ErrorCode::TooLarge, "brute force limited to 20 edges");

  std::unordered_map<int, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position[ground.edges[i].id] = i;
  std::vector<std::uint32_t> conflict_masks;
  for (const auto& c : conflicts) {
    const auto a = position.find(c.e1);
    const auto b = position.find(c.e2);
    if (a == position.end() || b == position.end()) continue;
    conflict_masks.push_back((1u << a->second) | (1u << b->second));
  }

  SelectionResult best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const bool feasible = std::none_of(conflict_masks.begin(), conflict_masks.end(),
                                       [&](std::uint32_t m) { return (mask & m) == m; });
    if (!feasible) continue;
    std::set<int> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.insert(ground.edges[i].id);
    const long score = coverage_score(s, ground);
    if (score > best.score) {
      best.score = score;
      best.selected = std::move(s);
    }
  }
  return best;
}

std::vector<ConflictPair> read_conflicts(std::istream& in) {
  std::vector<ConflictPair> out;
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
    int a = 0;
    int b = 0;
    double overlap = 0.0;
    std::string extra;
    if (!(ss >> a >> b >> overlap) || (ss >> extra) || a == b)
      throw Error(ErrorCode::ParseError, "conflict record malformed at line " + std::to_string(line_no));
    out.push_back({std::min(a, b), std::max(a, b), overlap});
  }
  return out;
}

std::vector<ConflictPair> read_conflicts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_conflicts(in);
}

void write_conflicts(std::ostream& out, const std::vector<ConflictPair>& conflicts) {
  out << std::setprecision(6);
  for (const auto& c : conflicts) out << c.e1 << ' ' << c.e2 << ' ' << c.overlap << '\n';
}

}  // namespace edgevo
