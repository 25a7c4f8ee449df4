#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/lattice.hpp"

namespace fpp {

template <class Rep>
struct GeodesicResult {
  Point source;
  Point target;
  bool reachable = false;
  Rep time = TimeTraits<Rep>::infinity();
  std::size_t min_hops = 0;
  LatticePath geodesic;  // first geodesic in lexicographic order among those with min_hops edges
  bool touched_boundary = false;
};

namespace detail {

inline constexpr std::size_t kNoVertex = std::numeric_limits<std::size_t>::max();

inline LatticePath trace_back(const BoxLattice& box, const std::vector<std::size_t>& pred, std::size_t target,
                              bool* touched_boundary) {
  std::vector<std::size_t> idx;
  for (std::size_t v = target; v != kNoVertex; v = pred[v]) idx.push_back(v);
  std::reverse(idx.begin(), idx.end());
  LatticePath p;
  p.vertices.reserve(idx.size());
  bool touched = false;
  for (auto v : idx) {
    p.vertices.push_back(box.point(v));
    touched = touched || box.on_boundary(v);
  }
  if (touched_boundary) *touched_boundary = touched;
  return p;
}

// Compares the stored paths ending at a and b (same hop count) by their first
// differing vertex. Vertex index order is the lexicographic order on points.
inline bool stored_path_less(const std::vector<std::size_t>& pred, std::size_t a, std::size_t b) {
  std::size_t first_a = a, first_b = b;
  while (a != b) {
    first_a = a;
    first_b = b;
    a = pred[a];
    b = pred[b];
  }
  return first_a < first_b;
}

}  // namespace detail

// Shortest path with lexicographic key (time, hops); among paths with equal
// key, the lexicographically smallest vertex sequence is kept. The result is
// t(source, target), the minimal hop count over geodesics, and the first such
// geodesic in lexicographic order.
template <class Rep>
GeodesicResult<Rep> geodesic_time(const Environment<Rep>& env, const Point& source, const Point& target) {
  using Traits = TimeTraits<Rep>;
  const auto& box = env.lattice();
  const std::size_t s = box.index(source);
  const std::size_t t = box.index(target);
  const int d = box.dim();
  const std::size_t n = box.vertex_count();

  std::vector<Rep> dist(n, Traits::infinity());
  std::vector<std::uint32_t> hops(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<std::size_t> pred(n, detail::kNoVertex);
  std::vector<char> done(n, 0);

  using Entry = std::tuple<Rep, std::uint32_t, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[s] = Rep{0};
  hops[s] = 0;
  heap.emplace(Rep{0}, 0u, s);

  while (!heap.empty()) {
    const auto [du, hu, u] = heap.top();
    heap.pop();
    if (done[u] || du != dist[u] || hu != hops[u]) continue;
    done[u] = 1;
    if (u == t) break;
    for (int axis = 0; axis < d; ++axis) {
      for (int sign : {-1, 1}) {
        const auto nb = box.neighbor(u, axis, sign);
        if (!nb || done[*nb]) continue;
        const Rep w = env.weight(box.edge_index(u, axis, sign));
        if (Traits::is_infinite(w)) continue;
        const std::size_t v = *nb;
        const Rep nd = du + w;
        const std::uint32_t nh = hu + 1;
        if (nd < dist[v] || (nd == dist[v] && nh < hops[v])) {
          dist[v] = nd;
          hops[v] = nh;
          pred[v] = u;
          heap.emplace(nd, nh, v);
        } else if (nd == dist[v] && nh == hops[v] && detail::stored_path_less(pred, u, pred[v])) {
          pred[v] = u;
        }
      }
    }
  }

  GeodesicResult<Rep> r;
  r.source = source;
  r.target = target;
  if (!done[t]) return r;
  r.reachable = true;
  r.time = dist[t];
  r.min_hops = hops[t];
  r.geodesic = detail::trace_back(box, pred, t, &r.touched_boundary);
  return r;
}

// True iff a finite-time path joins source and target inside the box.
template <class Rep>
bool reachability(const Environment<Rep>& env, const Point& source, const Point& target) {
  const auto& box = env.lattice();
  const std::size_t s = box.index(source);
  const std::size_t t = box.index(target);
  std::vector<char> seen(box.vertex_count(), 0);
  std::vector<std::size_t> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (u == t) return true;
    for (int axis = 0; axis < box.dim(); ++axis) {
      for (int sign : {-1, 1}) {
        const auto nb = box.neighbor(u, axis, sign);
        if (!nb || seen[*nb]) continue;
        if (TimeTraits<Rep>::is_infinite(env.weight(box.edge_index(u, axis, sign)))) continue;
        seen[*nb] = 1;
        stack.push_back(*nb);
      }
    }
  }
  return false;
}

// Exhaustive oracle support.

inline constexpr std::size_t kDefaultOracleVertexLimit = 20;

// Calls visit(path_indices) for every self-avoiding path from source to target
// inside the box. Only meant for tiny boxes.
template <class Visit>
void for_each_self_avoiding_path(const BoxLattice& box, std::size_t source, std::size_t target, Visit&& visit,
                                 std::size_t vertex_limit = kDefaultOracleVertexLimit) {
  if (box.vertex_count() > vertex_limit)
    throw std::length_error("self-avoiding path enumeration: box has " + std::to_string(box.vertex_count()) +
                            " vertices, limit is " + std::to_string(vertex_limit));
  std::vector<char> on_path(box.vertex_count(), 0);
  std::vector<std::size_t> path{source};
  on_path[source] = 1;
  auto dfs = [&](auto&& self, std::size_t u) -> void {
    if (u == target) {
      visit(static_cast<const std::vector<std::size_t>&>(path));
      return;
    }
    for (int axis = 0; axis < box.dim(); ++axis) {
      for (int sign : {-1, 1}) {
        const auto nb = box.neighbor(u, axis, sign);
        if (!nb || on_path[*nb]) continue;
        on_path[*nb] = 1;
        path.push_back(*nb);
        self(self, *nb);
        path.pop_back();
        on_path[*nb] = 0;
      }
    }
  };
  dfs(dfs, source);
}

inline LatticePath to_lattice_path(const BoxLattice& box, const std::vector<std::size_t>& idx) {
  LatticePath p;
  p.vertices.reserve(idx.size());
  for (auto v : idx) p.vertices.push_back(box.point(v));
  return p;
}

// All geodesics achieving the minimal hop count, sorted lexicographically.
// Empty when every path has infinite time.
template <class Rep>
std::vector<LatticePath> geodesic_time_all_minhops(const Environment<Rep>& env, const Point& source,
                                                   const Point& target,
                                                   std::size_t vertex_limit = kDefaultOracleVertexLimit) {
  using Traits = TimeTraits<Rep>;
  const auto& box = env.lattice();
  Rep best = Traits::infinity();
  std::size_t best_hops = std::numeric_limits<std::size_t>::max();
  std::vector<LatticePath> found;
  for_each_self_avoiding_path(
      box, box.index(source), box.index(target),
      [&](const std::vector<std::size_t>& idx) {
        Rep total{0};
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
          total = Traits::add(total, env.weight(box.edge_between(box.point(idx[i]), box.point(idx[i + 1]))));
        if (Traits::is_infinite(total)) return;
        const std::size_t h = idx.size() - 1;
        if (total < best || (total == best && h < best_hops)) {
          best = total;
          best_hops = h;
          found.clear();
        }
        if (total == best && h == best_hops) found.push_back(to_lattice_path(box, idx));
      },
      vertex_limit);
  std::sort(found.begin(), found.end());
  return found;
}

// Oracle counterpart of geodesic_time built on exhaustive enumeration.
template <class Rep>
GeodesicResult<Rep> geodesic_time_enumerate(const Environment<Rep>& env, const Point& source, const Point& target,
                                            std::size_t vertex_limit = kDefaultOracleVertexLimit) {
  GeodesicResult<Rep> r;
  r.source = source;
  r.target = target;
  auto all = geodesic_time_all_minhops(env, source, target, vertex_limit);
  if (all.empty()) return r;
  r.reachable = true;
  r.geodesic = all.front();
  r.min_hops = r.geodesic.edge_count();
  r.time = path_time(env, r.geodesic);
  for (const auto& v : r.geodesic.vertices) r.touched_boundary = r.touched_boundary || env.lattice().on_boundary(env.lattice().index(v));
  return r;
}

}  // namespace fpp
