#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpp/chain.hpp"
#include "fpp/directed.hpp"
#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/experiment.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/pattern.hpp"
#include "fpp/walks.hpp"

namespace fpp {

// Deterministic hard-assertion suite: every check is exact given the samples,
// so any failure points at an implementation defect.
struct VerifyConfig {
  std::shared_ptr<const DistributionSpec> spec;
  int dim = 2;
  std::uint64_t seed = 1;
  std::size_t oracle_envs = 50;
  std::size_t chain_trials = 200;
  std::int64_t chain_scale = 10;
  std::vector<double> direction{1.0, 1.0};
  std::vector<Rational> shifts;  // empty: default sweep
  Rational eps{1, 20};
  double rho = 0.5;
  std::size_t random_walks = 1000;
  std::optional<Pattern> pattern;
  bool corrupt_shift = false;  // fixture: the shift skips every other edge slot

  nlohmann::json to_json() const {
    nlohmann::json j{{"distribution", spec ? spec->to_json() : nlohmann::json()},
                     {"dim", dim},
                     {"seed", seed},
                     {"oracle_envs", oracle_envs},
                     {"chain_trials", chain_trials},
                     {"chain_scale", chain_scale},
                     {"direction", direction},
                     {"delta", eps.str()},
                     {"rho", rho},
                     {"random_walks", random_walks},
                     {"corrupt_shift", corrupt_shift}};
    j["shifts"] = nlohmann::json::array();
    for (const auto& s : shifts) j["shifts"].push_back(s.str());
    if (pattern) j["pattern"] = pattern->to_json();
    return j;
  }
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::optional<Pattern> pattern;
  double max_safe_delta = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return &c;
    return nullptr;
  }
  nlohmann::json to_json() const {
    nlohmann::json j{{"passed", passed()}, {"max_safe_delta", max_safe_delta}};
    j["pattern"] = pattern ? pattern->to_json() : nlohmann::json(nullptr);
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"cases", c.cases}, {"detail", c.detail}});
    return j;
  }
};

namespace detail {

// Small boxes (at most 12 vertices) for the exhaustive geodesic oracle.
inline std::vector<Point> oracle_box_shapes(int dim) {
  if (dim == 2) return {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {2, 3}, {3, 2}, {1, 4}, {1, 5}};
  if (dim == 3) return {{1, 1, 1}, {1, 1, 2}, {1, 2, 1}, {2, 1, 1}};
  return {Point(static_cast<std::size_t>(dim), 1)};
}

inline CheckResult& add_check(VerifyReport& r, std::string name) {
  r.checks.push_back(CheckResult{std::move(name), true, 0, {}});
  return r.checks.back();
}

inline void fail(CheckResult& c, const std::string& why) {
  if (c.passed) c.detail = why;
  c.passed = false;
}

inline void claim1_checks(VerifyReport& rep, const Pattern& p) {
  const PatternGeometry g(p);
  auto& centre = add_check(rep, "claim1.centre_in_H");
  centre.cases = 1;
  const bool centre_ok = p.is_infinite() ? g.detour_uniquely_optimal(g.two_level(p.a, TimeTraits<double>::infinity()))
                                         : worst_corner_in_H(g, 0.0);
  if (centre_ok != p.length_condition())
    fail(centre, "G(0) membership in H disagrees with the length condition l > 2a/(b-a)");

  auto& safe = add_check(rep, "claim1.max_safe_delta");
  if (!p.is_infinite()) {
    rep.max_safe_delta = max_safe_delta(p);
    safe.cases = 1;
    safe.detail = "max_safe_delta=" + std::to_string(rep.max_safe_delta);
    if ((rep.max_safe_delta > 0.0) != p.length_condition())
      fail(safe, "max_safe_delta positivity disagrees with the length condition");
    if (rep.max_safe_delta > 0.0) {
      const bool certified = g.edges().size() <= 16 ? corners_in_H(g, rep.max_safe_delta)
                                                     : worst_corner_in_H(g, rep.max_safe_delta);
      if (!certified) fail(safe, "G(max_safe_delta) is not contained in H");
    }
  }

  auto& structure = add_check(rep, "claim1.structure");
  const auto& plus = p.pi_plus();
  for (const auto& path : g.paths()) {
    ++structure.cases;
    if (path.path == plus) continue;
    if (axis_edge_count(path.path, 1) < 2 || axis_edge_count(path.path, 1) % 2 != 0)
      fail(structure, "a path other than pi+ uses fewer than two (or an odd number of) e2 edges");
    if (axis_edge_count(path.path, 0) < static_cast<std::size_t>(p.length))
      fail(structure, "a path uses fewer than l e1 edges");
  }
}

template <class Rep>
void geodesic_oracle_check(VerifyReport& rep, const VerifyConfig& cfg) {
  auto& c = add_check(rep, "geodesic.oracle");
  const auto shapes = oracle_box_shapes(cfg.dim);
  const CounterRng pick{cfg.seed, 0x6e0000};
  for (std::size_t i = 0; i < cfg.oracle_envs; ++i) {
    const Point hi = shapes[i % shapes.size()];
    const BoxLattice box(Point(hi.size(), 0), hi);
    const auto env = sample_environment<Rep>(cfg.spec, box, cfg.seed, 0x10000 + i);
    const auto u = pick.uniforms(i);
    const Point s = box.point(static_cast<std::size_t>(u[0] * static_cast<double>(box.vertex_count())));
    const Point t = box.point(static_cast<std::size_t>(u[1] * static_cast<double>(box.vertex_count())));
    const auto fast = geodesic_time(env, s, t);
    const auto slow = geodesic_time_enumerate(env, s, t);
    ++c.cases;
    if (fast.reachable != slow.reachable || (fast.reachable && (!TimeTraits<Rep>::equal(fast.time, slow.time) || fast.min_hops != slow.min_hops ||
                                                                fast.geodesic != slow.geodesic)))
      fail(c, "Dijkstra and enumeration disagree on environment " + std::to_string(i));
    if (fast.reachable != reachability(env, s, t)) fail(c, "reachability disagrees with the geodesic search");
  }
}

template <class Rep>
void directed_oracle_check(VerifyReport& rep, const VerifyConfig& cfg) {
  add_check(rep, "directed.oracle");
  add_check(rep, "directed.argmin_invariance");
  auto& c = rep.checks[rep.checks.size() - 2];
  auto& inv = rep.checks.back();
  const auto shifts = cfg.shifts.empty() ? default_shifts(*cfg.spec) : cfg.shifts;
  const CounterRng pick{cfg.seed, 0x6e0001};
  for (std::size_t i = 0; i < cfg.oracle_envs; ++i) {
    Point target(static_cast<std::size_t>(cfg.dim), 0);
    const auto u = pick.uniforms(i);
    target[0] = static_cast<std::int64_t>(u[0] * 5.0);
    target[1] = static_cast<std::int64_t>(u[1] * 5.0);
    const BoxLattice box(Point(target.size(), 0), target + Point(target.size(), 1));
    const auto env = sample_environment<Rep>(cfg.spec, box, cfg.seed, 0x20000 + i);
    ++c.cases;
    const auto dp = directed_time(env, target);
    using Tr = TimeTraits<Rep>;
    if (!Tr::equal(dp.time, directed_time_enumerate(env, target)) || !Tr::equal(dp.time, directed_time_value(env, target)) ||
        !Tr::equal(path_time(env, dp.geodesic), dp.time))
      fail(c, "DP and enumeration disagree on environment " + std::to_string(i));
    if (!TimeTraits<Rep>::is_infinite(dp.time)) {
      for (const auto& s : shifts) {
        ++inv.cases;
        if (!directed_argmin_invariance_check(env, s, target).holds())
          fail(inv, "optimal directed path set changed under shift " + s.str());
      }
    }
  }
}

template <class Rep>
Environment<Rep> corrupt(const Environment<Rep>& base, const Environment<Rep>& shifted) {
  std::vector<Rep> w(shifted.weights().begin(), shifted.weights().end());
  for (std::size_t s = 1; s < w.size(); s += 2) w[s] = base.weight(s);
  return Environment<Rep>(shifted.lattice(), std::move(w), shifted.scale(), shifted.seed(), shifted.trial_id(),
                          shifted.spec());
}

template <class Rep>
void chain_checks(VerifyReport& rep, const VerifyConfig& cfg, const std::optional<PatternGeometry>& geometry) {
  const auto shifts = cfg.shifts.empty() ? default_shifts(*cfg.spec) : cfg.shifts;
  // indices, not references: add_check grows the vector
  std::vector<std::size_t> link_checks;
  for (int k = 1; k <= 6; ++k) {
    link_checks.push_back(rep.checks.size());
    add_check(rep, chain_failure_name(k));
  }
  const std::size_t t_le_idx = rep.checks.size();
  add_check(rep, "t_le_directed_t");
  const std::size_t claim2_idx = rep.checks.size();
  add_check(rep, "claim2");
  const std::size_t identity_idx = rep.checks.size();
  add_check(rep, "shift.identity");

  const Point target = scaled_target(cfg.direction, cfg.chain_scale);
  const BoxLattice box = experiment_box(target, cfg.rho);
  const Point origin(target.size(), 0);
  std::int64_t scale = cfg.spec->exact() ? detail::common_scale(*cfg.spec, shifts) : 1;
  for (std::size_t i = 0; i < cfg.chain_trials; ++i) {
    auto env = sample_environment<Rep>(cfg.spec, box, cfg.seed, 0x30000 + i);
    if constexpr (TimeTraits<Rep>::exact)
      if (env.scale() != scale) env = rescale(env, scale);
    const auto geo = geodesic_time(env, origin, target);
    const auto dir = directed_time(env, target, true);
    rep.checks[t_le_idx].cases++;
    if (!TimeTraits<Rep>::less_equal(geo.time, dir.time)) fail(rep.checks[t_le_idx], "t > directed t");
    if (geo.reachable && geometry) {
      rep.checks[claim2_idx].cases++;
      if (!claim2_check(geo.geodesic, find_occurrences(env, geo.geodesic, *geometry).size()))
        fail(rep.checks[claim2_idx], "geodesic violates |pi| >= |x|_1 + N(pi)");
    }
    for (const auto& s : shifts) {
      auto pair = make_shifted_pair(env, s);
      if (cfg.corrupt_shift) pair.shifted = corrupt(pair.base, pair.shifted);
      const auto r = verify_inequality_chain(pair.base, pair.shifted, pair.delta_units, target, cfg.eps, geo, dir);
      if (!r.applicable) continue;
      for (int k = 0; k < 6; ++k) {
        auto& c = rep.checks[link_checks[static_cast<std::size_t>(k)]];
        ++c.cases;
        const bool ok = k < 5 ? r.links[static_cast<std::size_t>(k)] : r.implication_holds();
        if (!ok) fail(c, "trial " + std::to_string(i) + ", shift " + s.str());
      }
      // identity on the geodesic and on a random walk clipped to the box
      for (const LatticePath* p : {&r.shifted_geodesic.geodesic, &r.shifted_directed.geodesic}) {
        ++rep.checks[identity_idx].cases;
        const Rep lhs = path_time(pair.shifted, *p);
        const Rep rhs = path_time(pair.base, *p) + pair.delta_units * static_cast<Rep>(p->edge_count());
        if (!TimeTraits<Rep>::equal(lhs, rhs)) fail(rep.checks[identity_idx], "T_delta(pi) != T(pi) + delta |pi|_e");
      }
    }
  }
}

inline void random_walk_claim2(VerifyReport& rep, const VerifyConfig& cfg, const std::optional<PatternGeometry>& g) {
  auto& c = add_check(rep, "claim2.random_walks");
  if (!g) {
    c.detail = "no pattern for this law";
    return;
  }
  // Environment where every edge is at the pattern's detour value, so any
  // walk segment shaped like pi++ whose surrounding ladder is at b counts.
  const Point origin(static_cast<std::size_t>(cfg.dim), 0);
  const CounterRng rng{cfg.seed, 0x40000};
  const std::int64_t radius = 12;
  const BoxLattice box(origin - Point(origin.size(), radius), origin + Point(origin.size(), radius));
  const auto& p = g->pattern();
  std::vector<double> w(box.edge_slot_count(), TimeTraits<double>::infinity());
  const CounterRng coin{cfg.seed, 0x40001};
  for (std::size_t s = 0; s < w.size(); ++s)
    if (box.edge_slot_valid(s)) w[s] = coin.uniform(s) < 0.5 ? p.a : (p.is_infinite() ? p.a : p.b);
  const RealEnvironment env(box, std::move(w));
  for (std::size_t i = 0; i < cfg.random_walks; ++i) {
    auto walk = random_self_avoiding_walk(rng, i * 64, origin, 40);
    while (!path_inside(box, walk)) walk.vertices.pop_back();
    ++c.cases;
    if (!claim2_check(walk, find_occurrences(env, walk, *g).size())) fail(c, "walk " + std::to_string(i));
  }
}

}  // namespace detail

inline VerifyReport run_verify_suite(const VerifyConfig& cfg) {
  if (!cfg.spec) throw std::invalid_argument("verify: missing distribution");
  VerifyReport rep;
  rep.pattern = cfg.pattern ? cfg.pattern : default_pattern(*cfg.spec, cfg.dim);
  std::optional<PatternGeometry> geometry;
  if (rep.pattern) {
    detail::claim1_checks(rep, *rep.pattern);
    geometry.emplace(*rep.pattern);
  }
  detail::dispatch_time_rep(*cfg.spec, [&]<class Rep>() {
    detail::geodesic_oracle_check<Rep>(rep, cfg);
    detail::directed_oracle_check<Rep>(rep, cfg);
    detail::chain_checks<Rep>(rep, cfg, geometry);
    return 0;
  });
  detail::random_walk_claim2(rep, cfg, geometry);
  return rep;
}

}  // namespace fpp
