#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "fpp/directed.hpp"
#include "fpp/environment.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/rational.hpp"

namespace fpp {

// Per-sample evaluation of the comparison between geodesic and directed
// geodesic times through the shifted environment T_delta = T + delta:
//   (1) t(0,x) <= T(g)                          g  = geodesic in T_delta
//   (2) T(g) == T_delta(g) - delta |g|_e
//   (3) T_delta(g) <= T_delta(h)                h  = directed geodesic in T_delta
//   (4) |h|_e == |x|_1 and T(h) == T_delta(h) - delta |x|_1
//   (5) T(h) == directed t(0,x)
// and, when |g|_e >= (1 + eps) |x|_1, the conclusion t <= directed t - delta eps |x|_1.
template <class Rep>
struct ChainReport {
  bool applicable = true;  // false when some time is infinite (no finite geodesic)
  std::array<bool, 5> links{true, true, true, true, true};
  bool premise = false;        // |g|_e >= (1 + eps) |x|_1
  bool gap_event = false;      // t <= directed t - delta eps |x|_1
  std::size_t shifted_hops = 0;
  GeodesicResult<Rep> shifted_geodesic;
  DirectedResult<Rep> shifted_directed;

  bool implication_holds() const { return !premise || gap_event; }
  bool holds() const {
    for (bool l : links)
      if (!l) return false;
    return implication_holds();
  }
  // 1..5 for a failed link, 6 for a failed implication, 0 when everything holds.
  int first_failure() const {
    for (int i = 0; i < 5; ++i)
      if (!links[static_cast<std::size_t>(i)]) return i + 1;
    return implication_holds() ? 0 : 6;
  }
};

inline std::string chain_failure_name(int code) {
  if (code >= 1 && code <= 5) return "chain.link" + std::to_string(code);
  if (code == 6) return "chain.implication";
  return "";
}

// base and shifted must share one scale; delta_units is delta in that scale.
// base_geo / base_dir are the undirected and directed results on `base`.
template <class Rep>
ChainReport<Rep> verify_inequality_chain(const Environment<Rep>& base, const Environment<Rep>& shifted, Rep delta_units,
                                         const Point& target, Rational eps, const GeodesicResult<Rep>& base_geo,
                                         const DirectedResult<Rep>& base_dir) {
  using Traits = TimeTraits<Rep>;
  ChainReport<Rep> r;
  r.shifted_geodesic = geodesic_time(shifted, Point(target.size(), 0), target);
  r.shifted_directed = directed_time(shifted, target, true);
  if (!base_geo.reachable || !r.shifted_geodesic.reachable || Traits::is_infinite(base_dir.time) ||
      Traits::is_infinite(r.shifted_directed.time)) {
    r.applicable = false;
    return r;
  }
  const auto norm = static_cast<Rep>(l1_norm(target));
  const LatticePath& g = r.shifted_geodesic.geodesic;
  const LatticePath& h = r.shifted_directed.geodesic;
  r.shifted_hops = g.edge_count();

  const Rep t = base_geo.time;
  const Rep t_dir = base_dir.time;
  const Rep T_g = path_time(base, g);
  const Rep Td_g = path_time(shifted, g);
  const Rep T_h = path_time(base, h);
  const Rep Td_h = path_time(shifted, h);

  r.links[0] = Traits::less_equal(t, T_g);
  r.links[1] = Traits::equal(T_g, Td_g - delta_units * static_cast<Rep>(g.edge_count()));
  r.links[2] = Traits::less_equal(Td_g, Td_h);
  r.links[3] = h.edge_count() == static_cast<std::size_t>(l1_norm(target)) && Traits::equal(T_h, Td_h - delta_units * norm);
  r.links[4] = Traits::equal(T_h, t_dir);

  const auto num = static_cast<Rep>(eps.num());
  const auto den = static_cast<Rep>(eps.den());
  r.premise = static_cast<Rep>(g.edge_count()) * den >= (den + num) * norm;
  r.gap_event = Traits::less_equal(delta_units * num * norm, (t_dir - t) * den);
  return r;
}

}  // namespace fpp
