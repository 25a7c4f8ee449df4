#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fpp/environment.hpp"
#include "fpp/lattice.hpp"

namespace fpp {

template <class Rep>
struct DirectedResult {
  Point target;
  Rep time = TimeTraits<Rep>::infinity();
  LatticePath geodesic;  // empty when not requested
};

namespace detail {

// Row-major grid over the rectangle [0, target]; row-major order is a
// topological order of the directed lattice restricted to it.
struct Rectangle {
  Point target;
  std::vector<std::size_t> stride;
  std::size_t size = 1;

  explicit Rectangle(Point t) : target(std::move(t)), stride(target.size(), 1) {
    for (std::size_t j = target.size(); j-- > 0;) {
      stride[j] = size;
      size *= static_cast<std::size_t>(target[j] + 1);
    }
  }
  std::int64_t coord(std::size_t idx, std::size_t j) const {
    return static_cast<std::int64_t>((idx / stride[j]) % static_cast<std::size_t>(target[j] + 1));
  }
};

template <class Rep>
void check_directed_target(const Environment<Rep>& env, const Point& target) {
  if (static_cast<int>(target.size()) != env.lattice().dim())
    throw std::invalid_argument("directed_time: target dimension mismatch");
  if (!is_nonnegative(target))
    throw std::invalid_argument("directed_time: target (" + format_point(target) + ") has a negative coordinate");
  const Point origin(target.size(), 0);
  if (!env.lattice().contains(origin) || !env.lattice().contains(target))
    throw std::out_of_range("directed_time: rectangle [0, target] leaves the box");
}

}  // namespace detail

// t(0, target) over directed paths, by dynamic programming
//   V(0) = 0,  V(z) = min_j V(z - e_j) + T({z - e_j, z}).
// With want_path, the geodesic is recovered by backtracking from the target,
// taking the smallest tight direction index at each step.
template <class Rep>
DirectedResult<Rep> directed_time(const Environment<Rep>& env, const Point& target, bool want_path = true) {
  using Traits = TimeTraits<Rep>;
  detail::check_directed_target(env, target);
  const auto& box = env.lattice();
  const std::size_t d = target.size();
  const detail::Rectangle rect(target);
  const std::size_t origin = box.index(Point(d, 0));

  std::vector<Rep> value(rect.size, Traits::infinity());
  // box index of every rectangle cell, filled incrementally in row-major order
  std::vector<std::size_t> box_idx(rect.size);
  for (std::size_t i = 0; i < rect.size; ++i) {
    std::size_t b = origin;
    for (std::size_t j = 0; j < d; ++j) b += static_cast<std::size_t>(rect.coord(i, j)) * box.stride(static_cast<int>(j));
    box_idx[i] = b;
    if (i == 0) {
      value[i] = Rep{0};
      continue;
    }
    Rep best = Traits::infinity();
    for (std::size_t j = 0; j < d; ++j) {
      if (rect.coord(i, j) == 0) continue;
      const std::size_t prev = i - rect.stride[j];
      const Rep w = env.weight(box.edge_index(b, static_cast<int>(j), -1));
      const Rep cand = Traits::add(value[prev], w);
      if (cand < best) best = cand;
    }
    value[i] = best;
  }

  DirectedResult<Rep> r;
  r.target = target;
  r.time = value[rect.size - 1];
  if (!want_path) return r;

  std::vector<Point> rev;
  std::size_t i = rect.size - 1;
  rev.push_back(target);
  while (i != 0) {
    std::size_t chosen = rect.size;
    for (std::size_t j = 0; j < d; ++j) {
      if (rect.coord(i, j) == 0) continue;
      const std::size_t prev = i - rect.stride[j];
      const Rep w = env.weight(box.edge_index(box_idx[i], static_cast<int>(j), -1));
      if (Traits::add(value[prev], w) == value[i]) {
        chosen = prev;
        break;
      }
    }
    i = chosen;
    Point z(d);
    for (std::size_t j = 0; j < d; ++j) z[j] = rect.coord(i, j);
    rev.push_back(std::move(z));
  }
  std::reverse(rev.begin(), rev.end());
  r.geodesic.vertices = std::move(rev);
  return r;
}

// Value-only variant keeping two slices of the first coordinate, O(n^{d-1}) memory.
template <class Rep>
Rep directed_time_value(const Environment<Rep>& env, const Point& target) {
  using Traits = TimeTraits<Rep>;
  detail::check_directed_target(env, target);
  const auto& box = env.lattice();
  const std::size_t d = target.size();
  Point rest(target.begin() + 1, target.end());
  rest.insert(rest.begin(), 0);
  const detail::Rectangle slice(rest);
  const std::size_t origin = box.index(Point(d, 0));

  std::vector<Rep> prev(slice.size, Traits::infinity());
  std::vector<Rep> cur(slice.size, Traits::infinity());
  for (std::int64_t x1 = 0; x1 <= target[0]; ++x1) {
    for (std::size_t i = 0; i < slice.size; ++i) {
      std::size_t b = origin + static_cast<std::size_t>(x1) * box.stride(0);
      for (std::size_t j = 1; j < d; ++j) b += static_cast<std::size_t>(slice.coord(i, j)) * box.stride(static_cast<int>(j));
      if (x1 == 0 && i == 0) {
        cur[i] = Rep{0};
        continue;
      }
      Rep best = Traits::infinity();
      if (x1 > 0) best = Traits::add(prev[i], env.weight(box.edge_index(b, 0, -1)));
      for (std::size_t j = 1; j < d; ++j) {
        if (slice.coord(i, j) == 0) continue;
        const Rep cand = Traits::add(cur[i - slice.stride[j]], env.weight(box.edge_index(b, static_cast<int>(j), -1)));
        if (cand < best) best = cand;
      }
      cur[i] = best;
    }
    std::swap(prev, cur);
  }
  return prev[slice.size - 1];
}

inline constexpr std::int64_t kDirectedEnumerationLimit = 16;

// Calls visit(path) for every directed path from the origin to target.
template <class Visit>
void for_each_directed_path(const Point& target, Visit&& visit, std::int64_t norm_limit = kDirectedEnumerationLimit) {
  if (!is_nonnegative(target)) throw std::invalid_argument("directed enumeration: negative target");
  if (l1_norm(target) > norm_limit)
    throw std::length_error("directed enumeration: |target|_1 = " + std::to_string(l1_norm(target)) +
                            " exceeds limit " + std::to_string(norm_limit));
  LatticePath p;
  p.vertices.push_back(Point(target.size(), 0));
  auto rec = [&](auto&& self) -> void {
    const Point& z = p.vertices.back();
    if (z == target) {
      visit(static_cast<const LatticePath&>(p));
      return;
    }
    for (std::size_t j = 0; j < target.size(); ++j) {
      if (p.vertices.back()[j] == target[j]) continue;
      Point next = p.vertices.back();
      ++next[j];
      p.vertices.push_back(std::move(next));
      self(self);
      p.vertices.pop_back();
    }
  };
  rec(rec);
}

// Brute-force oracle: minimum passage time over an explicit list of all directed paths.
template <class Rep>
Rep directed_time_enumerate(const Environment<Rep>& env, const Point& target,
                            std::int64_t norm_limit = kDirectedEnumerationLimit) {
  Rep best = TimeTraits<Rep>::infinity();
  for_each_directed_path(
      target, [&](const LatticePath& p) { best = std::min(best, path_time(env, p)); }, norm_limit);
  return best;
}

inline std::size_t count_directed_paths(const Point& target, std::int64_t norm_limit = kDirectedEnumerationLimit) {
  std::size_t n = 0;
  for_each_directed_path(target, [&](const LatticePath&) { ++n; }, norm_limit);
  return n;
}

// Every optimal directed path, in enumeration order (sorted lexicographically).
template <class Rep>
std::vector<LatticePath> directed_optimal_paths(const Environment<Rep>& env, const Point& target,
                                                std::int64_t norm_limit = kDirectedEnumerationLimit) {
  using Traits = TimeTraits<Rep>;
  const Rep best = directed_time_enumerate(env, target, norm_limit);
  std::vector<LatticePath> out;
  for_each_directed_path(
      target,
      [&](const LatticePath& p) {
        if (Traits::equal(path_time(env, p), best)) out.push_back(p);
      },
      norm_limit);
  std::sort(out.begin(), out.end());
  return out;
}

// An environment together with its shift, both expressed at the same scale so
// that T_delta(pi) = T(pi) + delta_units * |pi|_e holds in Rep arithmetic.
template <class Rep>
struct ShiftedPair {
  Environment<Rep> base;
  Environment<Rep> shifted;
  Rep delta_units;
};

inline ShiftedPair<ExactTime> make_shifted_pair(const ExactEnvironment& env, Rational delta) {
  ExactEnvironment shifted = shift_environment(env, delta);
  ExactEnvironment base = shifted.scale() == env.scale() ? env : rescale(env, shifted.scale());
  const ExactTime units = delta.num() * (shifted.scale() / delta.den());
  return {std::move(base), std::move(shifted), units};
}

inline ShiftedPair<RealTime> make_shifted_pair(const RealEnvironment& env, Rational delta) {
  return {env, shift_environment(env, delta.to_double()), delta.to_double()};
}

struct ArgminInvariance {
  bool same_optimal_set = false;
  bool value_shift_exact = false;
  std::size_t optimal_count = 0;
  bool holds() const { return same_optimal_set && value_shift_exact; }
};

// The set of directed geodesics to target is the same before and after the
// shift, and the directed time moves by exactly delta * |target|_1.
template <class Rep>
ArgminInvariance directed_argmin_invariance_check(const Environment<Rep>& env, Rational delta, const Point& target,
                                                  std::int64_t norm_limit = kDirectedEnumerationLimit) {
  using Traits = TimeTraits<Rep>;
  const auto pair = make_shifted_pair(env, delta);
  const auto before = directed_optimal_paths(pair.base, target, norm_limit);
  const auto after = directed_optimal_paths(pair.shifted, target, norm_limit);
  ArgminInvariance out;
  out.optimal_count = before.size();
  out.same_optimal_set = before == after;
  const Rep t = directed_time(pair.base, target, false).time;
  const Rep ts = directed_time(pair.shifted, target, false).time;
  const auto steps = static_cast<Rep>(l1_norm(target));
  out.value_shift_exact = Traits::is_infinite(t) ? Traits::is_infinite(ts)
                                                 : Traits::equal(ts, t + pair.delta_units * steps);
  return out;
}

}  // namespace fpp
