#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/lattice.hpp"

namespace fpp {

// Local configuration that makes the detour pi++ (up, across, down) strictly
// faster than the straight segment pi+ inside the ladder
//   Lambda = {0..l} x {0,1} x {0}^{d-2},  u = 0,  v = l e_1.
// The infinite variant lives on the unit square: the base edge {u, v} is
// infinite and the three detour edges equal a'.
struct Pattern {
  enum class Kind { kStandard, kInfinite };

  Kind kind = Kind::kStandard;
  int dim = 2;
  std::int64_t length = 1;  // l
  double a = 0.0;           // a' in the infinite variant
  double b = 1.0;           // unused in the infinite variant
  double delta = 0.0;

  static Pattern standard(int dim, std::int64_t length, double a, double b, double delta = 0.0) {
    if (dim < 2) throw std::invalid_argument("Pattern: dimension must be at least 2");
    if (length < 1) throw std::invalid_argument("Pattern: length must be positive");
    if (!(a >= 0.0 && b > a && std::isfinite(b))) throw std::invalid_argument("Pattern: need 0 <= a < b < inf");
    return Pattern{Kind::kStandard, dim, length, a, b, delta};
  }
  static Pattern infinite(int dim, double a_prime) {
    if (dim < 2) throw std::invalid_argument("Pattern: dimension must be at least 2");
    return Pattern{Kind::kInfinite, dim, 1, a_prime, std::numeric_limits<double>::infinity(), 0.0};
  }

  bool is_infinite() const { return kind == Kind::kInfinite; }

  // l > 2a / (b - a); always true for the infinite variant.
  bool length_condition() const { return is_infinite() || static_cast<double>(length) * (b - a) > 2.0 * a; }

  static std::int64_t smallest_valid_length(double a, double b) {
    return static_cast<std::int64_t>(std::floor(2.0 * a / (b - a))) + 1;
  }

  BoxLattice box() const {
    Point lo(static_cast<std::size_t>(dim), 0), hi(static_cast<std::size_t>(dim), 0);
    hi[0] = length;
    hi[1] = 1;
    return BoxLattice(lo, hi);
  }
  Point u() const { return Point(static_cast<std::size_t>(dim), 0); }
  Point v() const { return unit_vector(dim, 0, length); }

  LatticePath pi_plus() const {
    LatticePath p;
    for (std::int64_t i = 0; i <= length; ++i) p.vertices.push_back(unit_vector(dim, 0, i));
    return p;
  }
  LatticePath pi_plus_plus() const {
    LatticePath p;
    p.vertices.push_back(u());
    for (std::int64_t i = 0; i <= length; ++i) p.vertices.push_back(unit_vector(dim, 0, i) + unit_vector(dim, 1));
    p.vertices.push_back(v());
    return p;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", is_infinite() ? "infinite" : "standard"}, {"dim", dim}, {"length", length}, {"a", a}};
    if (!is_infinite()) {
      j["b"] = b;
      j["delta"] = delta;
    }
    return j;
  }
};

using Edge = std::pair<Point, Point>;  // endpoints in increasing order

inline Edge make_edge(const Point& x, const Point& y) { return x < y ? Edge{x, y} : Edge{y, x}; }

// Passage times on the edges of Lambda.
using EdgeAssignment = std::map<Edge, double>;

// Enumeration data of a pattern's ladder: its edges, pi+ and pi++ as edge
// index lists, and every self-avoiding path u -> v inside Lambda.
class PatternGeometry {
 public:
  static constexpr std::int64_t kMaxLength = 16;

  explicit PatternGeometry(const Pattern& pattern) : pattern_(pattern), box_(pattern.box()) {
    if (pattern.length > kMaxLength)
      throw std::length_error("PatternGeometry: ladder length " + std::to_string(pattern.length) +
                              " exceeds enumeration limit " + std::to_string(kMaxLength));
    for (std::size_t s = 0; s < box_.edge_slot_count(); ++s) {
      if (!box_.edge_slot_valid(s)) continue;
      const auto d = static_cast<std::size_t>(box_.dim());
      const Point lower = box_.point(s / d);
      const Point upper = lower + unit_vector(box_.dim(), static_cast<int>(s % d));
      slot_to_edge_[s] = edges_.size();
      edges_.push_back(make_edge(lower, upper));
    }
    pi_plus_ = edge_list(pattern.pi_plus());
    pi_plus_plus_ = edge_list(pattern.pi_plus_plus());
    in_detour_.assign(edges_.size(), false);
    for (auto e : pi_plus_plus_) in_detour_[e] = true;
    for_each_self_avoiding_path(
        box_, box_.index(pattern.u()), box_.index(pattern.v()),
        [&](const std::vector<std::size_t>& idx) {
          std::vector<std::size_t> es;
          for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            es.push_back(slot_to_edge_.at(box_.edge_between(box_.point(idx[i]), box_.point(idx[i + 1]))));
          paths_.push_back(LatticePathEdges{to_lattice_path(box_, idx), std::move(es)});
        },
        box_.vertex_count());
  }

  struct LatticePathEdges {
    LatticePath path;
    std::vector<std::size_t> edges;
  };

  const Pattern& pattern() const { return pattern_; }
  const BoxLattice& box() const { return box_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& pi_plus() const { return pi_plus_; }
  const std::vector<std::size_t>& pi_plus_plus() const { return pi_plus_plus_; }
  bool in_detour(std::size_t e) const { return in_detour_[e]; }
  const std::vector<LatticePathEdges>& paths() const { return paths_; }

  std::size_t edge_id(const Point& x, const Point& y) const {
    return slot_to_edge_.at(box_.edge_between(x, y));
  }

  // Values in edge-id order; throws on an edge of Lambda missing from the assignment.
  std::vector<double> values(const EdgeAssignment& assignment) const {
    std::vector<double> out(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto it = assignment.find(edges_[e]);
      if (it == assignment.end())
        throw std::invalid_argument("pattern assignment misses edge (" + format_point(edges_[e].first) + ")-(" +
                                    format_point(edges_[e].second) + ")");
      out[e] = it->second;
    }
    return out;
  }

  EdgeAssignment assignment(const std::vector<double>& values) const {
    EdgeAssignment out;
    for (std::size_t e = 0; e < edges_.size(); ++e) out[edges_[e]] = values[e];
    return out;
  }

  // pi++ edges at detour_value, every other Lambda edge at other_value.
  std::vector<double> two_level(double detour_value, double other_value) const {
    std::vector<double> out(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) out[e] = in_detour_[e] ? detour_value : other_value;
    return out;
  }

  static double path_sum(const std::vector<std::size_t>& es, const std::vector<double>& values) {
    double s = 0.0;
    for (auto e : es) s += values[e];
    return s;
  }

  // pi++ is the unique optimal path u -> v inside Lambda.
  bool detour_uniquely_optimal(const std::vector<double>& values) const {
    const double best = path_sum(pi_plus_plus_, values);
    for (const auto& p : paths_) {
      if (p.edges == pi_plus_plus_) continue;
      if (!(best < path_sum(p.edges, values))) return false;
    }
    return true;
  }

  // Membership of the band event: detour edges in [a-d, a+d], the rest in [b-d, b+d].
  // The infinite variant requires detour edges equal to a' and the base edge infinite.
  bool in_band(const std::vector<double>& values, double delta) const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const double t = values[e];
      if (pattern_.is_infinite()) {
        if (in_detour_[e] ? !TimeTraits<double>::equal(t, pattern_.a) : !std::isinf(t)) return false;
      } else if (in_detour_[e]) {
        if (t < pattern_.a - delta || t > pattern_.a + delta) return false;
      } else {
        if (t < pattern_.b - delta || t > pattern_.b + delta) return false;
      }
    }
    return true;
  }

 private:
  std::vector<std::size_t> edge_list(const LatticePath& p) const {
    std::vector<std::size_t> es;
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) es.push_back(edge_id(p.vertices[i], p.vertices[i + 1]));
    return es;
  }

  Pattern pattern_;
  BoxLattice box_;
  std::vector<Edge> edges_;
  std::map<std::size_t, std::size_t> slot_to_edge_;
  std::vector<std::size_t> pi_plus_;
  std::vector<std::size_t> pi_plus_plus_;
  std::vector<bool> in_detour_;
  std::vector<LatticePathEdges> paths_;
};

inline bool in_G_delta(const EdgeAssignment& assignment, const Pattern& pattern) {
  const PatternGeometry g(pattern);
  return g.in_band(g.values(assignment), pattern.delta);
}

inline bool in_H(const EdgeAssignment& assignment, const Pattern& pattern) {
  const PatternGeometry g(pattern);
  return g.detour_uniquely_optimal(g.values(assignment));
}

// Every corner of G(delta) (each edge at one end of its band) lies in H.
// Exhaustive over 2^|E_Lambda| corners; the audit path of max_safe_delta.
inline bool corners_in_H(const PatternGeometry& g, double delta, std::size_t max_edges = 16) {
  const auto& p = g.pattern();
  const std::size_t m = g.edges().size();
  if (m > max_edges) throw std::length_error("corners_in_H: too many edges for full corner enumeration");
  std::vector<double> values(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    for (std::size_t e = 0; e < m; ++e) {
      const double centre = g.in_detour(e) ? p.a : p.b;
      values[e] = (mask >> e) & 1 ? centre + delta : centre - delta;
    }
    if (!g.detour_uniquely_optimal(values)) return false;
  }
  return true;
}

// Worst corner for the optimality of pi++: detour edges at a + delta, every
// other edge at b - delta. Each comparison T(pi) - T(pi++) is linear in the
// weights, so this corner minimises all of them at once.
inline bool worst_corner_in_H(const PatternGeometry& g, double delta) {
  return g.detour_uniquely_optimal(g.two_level(g.pattern().a + delta, g.pattern().b - delta));
}

// Largest delta (to within `resolution`) with G(delta) inside H, certified at
// the returned value. Zero when G(0) already fails.
inline double max_safe_delta(const Pattern& pattern, double resolution = 1e-9) {
  if (pattern.is_infinite()) return 0.0;
  const PatternGeometry g(pattern);
  if (!worst_corner_in_H(g, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 0.5 * (pattern.b - pattern.a);  // all weights equal there, pi+ wins
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (worst_corner_in_H(g, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Pattern parameters derived from the law: a = r, b = the next support point,
// l the smallest admissible length, delta half the safe width. A law with a
// single finite atom and an infinite atom gets the infinite variant.
inline std::optional<Pattern> default_pattern(const DistributionSpec& spec, int dim) {
  const auto finite_atoms = spec.finite_atom_values();
  if (spec.mass_infinite() > 0 && finite_atoms.size() == 1 && spec.pieces().empty())
    return Pattern::infinite(dim, finite_atoms.front());
  std::vector<double> points = finite_atoms;
  for (const auto& piece : spec.pieces()) {
    if (piece.probability <= 0) continue;
    points.push_back(piece.low);
    points.push_back(0.5 * (piece.low + piece.high));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 2) return std::nullopt;
  const double a = points[0];
  const double b = points[1];
  const std::int64_t length = Pattern::smallest_valid_length(a, b);
  if (length > PatternGeometry::kMaxLength) return std::nullopt;
  Pattern p = Pattern::standard(dim, length, a, b);
  p.delta = 0.5 * max_safe_delta(p);
  return p;
}

struct Occurrence {
  std::size_t start = 0;  // position in the path of the first vertex of the detour
  Point translate;        // tau: the detour is pi++ + tau
  bool reversed = false;  // traversed from v + tau to u + tau
};

namespace detail {

template <class Rep>
bool pattern_event_holds(const Environment<Rep>& env, const PatternGeometry& g, const Point& tau) {
  const auto& box = env.lattice();
  std::vector<double> values(g.edges().size());
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    const Point x = g.edges()[e].first + tau;
    const Point y = g.edges()[e].second + tau;
    if (!box.contains(x) || !box.contains(y)) return false;
    values[e] = env.to_real(env.weight(x, y));
  }
  return g.in_band(values, g.pattern().delta);
}

}  // namespace detail

// Greedy left-to-right scan for vertex-disjoint subpaths equal to a translate
// of pi++ (in either direction of travel) whose translated ladder satisfies
// the pattern event.
template <class Rep>
std::vector<Occurrence> find_occurrences(const Environment<Rep>& env, const LatticePath& p, const PatternGeometry& g) {
  const auto& pattern = g.pattern();
  if (pattern.dim != env.lattice().dim()) throw std::invalid_argument("find_occurrences: dimension mismatch");
  const LatticePath detour = pattern.pi_plus_plus();
  const std::size_t span = detour.vertices.size();
  const Point v = pattern.v();
  std::vector<Occurrence> out;
  std::size_t i = 0;
  while (i + span <= p.vertices.size()) {
    std::optional<Occurrence> hit;
    for (bool reversed : {false, true}) {
      const Point tau = reversed ? p.vertices[i] - v : p.vertices[i] - pattern.u();
      bool match = true;
      for (std::size_t k = 0; k < span && match; ++k) {
        const Point& expected = detour.vertices[reversed ? span - 1 - k : k];
        match = p.vertices[i + k] == expected + tau;
      }
      if (match && detail::pattern_event_holds(env, g, tau)) {
        hit = Occurrence{i, tau, reversed};
        break;
      }
    }
    if (hit) {
      out.push_back(std::move(*hit));
      i += span;
    } else {
      ++i;
    }
  }
  return out;
}

template <class Rep>
std::size_t count_occurrences(const Environment<Rep>& env, const LatticePath& p, const Pattern& pattern) {
  return find_occurrences(env, p, PatternGeometry(pattern)).size();
}

// |pi|_e >= |z2 - z1|_1 + N(pi).
inline bool claim2_check(const LatticePath& p, std::size_t count) {
  if (p.vertices.empty()) return count == 0;
  const auto span = static_cast<std::size_t>(l1_norm(p.target() - p.source()));
  return p.edge_count() >= span + count;
}

}  // namespace fpp
