#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "fpp/lattice.hpp"
#include "fpp/rng.hpp"

namespace fpp {

// Growth self-avoiding walk from `start`: each step picks uniformly among the
// unvisited neighbours and stops early when trapped. Draws come from the
// counter stream, item indices starting at `first_item`.
inline LatticePath random_self_avoiding_walk(const CounterRng& rng, std::uint64_t first_item, const Point& start,
                                             std::size_t max_steps) {
  const int d = static_cast<int>(start.size());
  LatticePath p;
  p.vertices.push_back(start);
  std::set<Point> seen{start};
  std::uint64_t item = first_item;
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::vector<Point> options;
    for (int axis = 0; axis < d; ++axis)
      for (int sign : {-1, 1}) {
        Point next = p.vertices.back() + unit_vector(d, axis, sign);
        if (!seen.count(next)) options.push_back(std::move(next));
      }
    if (options.empty()) break;
    const double u = rng.uniform(item++);
    const auto k = std::min(options.size() - 1, static_cast<std::size_t>(u * static_cast<double>(options.size())));
    seen.insert(options[k]);
    p.vertices.push_back(std::move(options[k]));
  }
  return p;
}

}  // namespace fpp
