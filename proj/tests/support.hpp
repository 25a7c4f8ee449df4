#pragma once

// Independent oracles and generators shared by the unit tests and the
// acceptance runner. Nothing here calls the library's search routines.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/lattice.hpp"

namespace fpp::testing {

inline std::shared_ptr<const DistributionSpec> two_point(std::int64_t a = 1, std::int64_t b = 2, double p = 0.5) {
  return std::make_shared<const DistributionSpec>(
      std::vector<Atom>{Atom::finite(Rational(a), p), Atom::finite(Rational(b), 1.0 - p)}, std::vector<UniformPiece>{});
}

inline std::shared_ptr<const DistributionSpec> point_mass(std::int64_t v = 1) {
  return std::make_shared<const DistributionSpec>(std::vector<Atom>{Atom::finite(Rational(v), 1.0)},
                                                  std::vector<UniformPiece>{});
}

// Environment with weights drawn by std::mt19937_64 from `values` (scale 1),
// so tests do not depend on the library's sampler.
inline ExactEnvironment random_exact_env(const BoxLattice& box, std::mt19937_64& gen, const std::vector<std::int64_t>& values) {
  std::vector<std::int64_t> w(box.edge_slot_count(), TimeTraits<std::int64_t>::infinity());
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  for (std::size_t s = 0; s < w.size(); ++s)
    if (box.edge_slot_valid(s)) w[s] = values[pick(gen)];
  return ExactEnvironment(box, std::move(w));
}

// Neighbours of v inside the box, found from coordinates only.
inline std::vector<Point> box_neighbours(const BoxLattice& box, const Point& v) {
  std::vector<Point> out;
  for (int axis = 0; axis < box.dim(); ++axis)
    for (int sign : {-1, 1}) {
      Point w = v;
      w[static_cast<std::size_t>(axis)] += sign;
      if (box.contains(w)) out.push_back(std::move(w));
    }
  return out;
}

// Label-correcting relaxation on (time, hops) until nothing changes.
// Weights must be nonnegative; infinite edges are skipped.
struct RelaxResult {
  bool reachable = false;
  std::int64_t time = 0;
  std::size_t hops = 0;
};

inline RelaxResult relax_oracle(const ExactEnvironment& env, const Point& s, const Point& t) {
  using Key = std::pair<std::int64_t, std::size_t>;
  const auto inf = TimeTraits<std::int64_t>::infinity();
  std::map<Point, Key> best;
  best[s] = {0, 0};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [v, key] : std::map<Point, Key>(best)) {
      for (const auto& w : box_neighbours(env.lattice(), v)) {
        const auto we = env.weight(v, w);
        if (we == inf) continue;
        const Key cand{key.first + we, key.second + 1};
        auto it = best.find(w);
        if (it == best.end() || cand < it->second) {
          best[w] = cand;
          changed = true;
        }
      }
    }
  }
  auto it = best.find(t);
  if (it == best.end()) return {};
  return {true, it->second.first, it->second.second};
}

// Directed time by memoised recursion over predecessors (independent of the
// DP's sweep order).
inline std::int64_t directed_recursive(const ExactEnvironment& env, const Point& x) {
  const auto inf = TimeTraits<std::int64_t>::infinity();
  std::map<Point, std::int64_t> memo;
  std::function<std::int64_t(const Point&)> go = [&](const Point& z) -> std::int64_t {
    bool origin = true;
    for (auto c : z) origin = origin && c == 0;
    if (origin) return 0;
    if (auto it = memo.find(z); it != memo.end()) return it->second;
    std::int64_t best = inf;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (z[j] == 0) continue;
      Point y = z;
      --y[j];
      const auto sub = go(y);
      const auto we = env.weight(y, z);
      if (sub == inf || we == inf) continue;
      best = std::min(best, sub + we);
    }
    memo[z] = best;
    return best;
  };
  return go(x);
}

// Passage time by direct summation with the coordinates.
inline std::int64_t sum_along(const ExactEnvironment& env, const LatticePath& p) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    const auto w = env.weight(p.vertices[i], p.vertices[i + 1]);
    if (w == TimeTraits<std::int64_t>::infinity()) return w;
    total += w;
  }
  return total;
}

inline LatticePath make_path(std::initializer_list<Point> vs) { return LatticePath{std::vector<Point>(vs)}; }

}  // namespace fpp::testing
