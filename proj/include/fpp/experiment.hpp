#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fpp/chain.hpp"
#include "fpp/directed.hpp"
#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/lattice.hpp"
#include "fpp/pattern.hpp"
#include "fpp/rational.hpp"
#include "fpp/stats.hpp"

namespace fpp {

struct ExperimentConfig {
  std::shared_ptr<const DistributionSpec> spec;
  CriticalConstants critical;
  std::vector<double> direction{1.0, 1.0};
  std::vector<std::int64_t> scales{50};
  std::vector<Rational> shifts;  // empty: default sweep {1/4, 1/2, 1} * (b - a)
  Rational eps{1, 20};           // the delta of the length and gap events
  std::vector<std::int64_t> norms{20, 40, 80, 160};
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double rho = 0.5;
  unsigned workers = 1;
  std::int64_t argmin_oracle_norm = 8;
  std::optional<Pattern> pattern;  // overrides the default pattern

  int dim() const { return static_cast<int>(direction.size()); }

  void validate() const {
    if (!spec) throw std::invalid_argument("experiment: missing distribution");
    if (direction.size() < 2) throw std::invalid_argument("experiment: direction needs at least 2 coordinates");
    bool nonzero = false;
    for (double c : direction) {
      if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("experiment: direction must be >= 0");
      nonzero = nonzero || c > 0.0;
    }
    if (!nonzero) throw std::invalid_argument("experiment: direction must be nonzero");
    if (trials == 0) throw std::invalid_argument("experiment: trials must be positive");
    for (auto n : scales)
      if (n <= 0) throw std::invalid_argument("experiment: scales must be positive");
    for (auto n : norms)
      if (n <= 0) throw std::invalid_argument("experiment: norms must be positive");
    for (const auto& s : shifts)
      if (s <= Rational(0)) throw std::invalid_argument("experiment: shifts must be positive");
    if (eps <= Rational(0)) throw std::invalid_argument("experiment: delta must be positive");
    if (!(rho >= 0.0)) throw std::invalid_argument("experiment: rho must be >= 0");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["distribution"] = spec ? spec->to_json() : nlohmann::json();
    j["critical"] = {{"p_c", critical.p_c}, {"p_c_directed", critical.p_c_directed}, {"provenance", critical.provenance}};
    j["direction"] = direction;
    j["scales"] = scales;
    j["shifts"] = nlohmann::json::array();
    for (const auto& s : shifts) j["shifts"].push_back(s.str());
    j["delta"] = eps.str();
    j["norms"] = norms;
    j["trials"] = trials;
    j["seed"] = seed;
    j["rho"] = rho;
    j["argmin_oracle_norm"] = argmin_oracle_norm;
    if (pattern) j["pattern"] = pattern->to_json();
    return j;
  }
};

// The pattern in force for a configuration, if the law admits one.
inline std::optional<Pattern> resolve_pattern(const ExperimentConfig& cfg) {
  if (cfg.pattern) return cfg.pattern;
  return default_pattern(*cfg.spec, cfg.dim());
}

// Default shift sweep in units of (b - a) for the two smallest support points;
// a law with a single support point uses unit spacing.
inline std::vector<Rational> default_shifts(const DistributionSpec& spec) {
  Rational unit(1);
  const auto exact = spec.finite_atom_exact_values();
  if (spec.exact() && exact.size() >= 2) unit = exact[1] - exact[0];
  return {unit * Rational(1, 4), unit * Rational(1, 2), unit};
}

inline std::vector<Rational> resolved_shifts(const ExperimentConfig& cfg) {
  return cfg.shifts.empty() ? default_shifts(*cfg.spec) : cfg.shifts;
}

// floor(n x)
inline Point scaled_target(std::span<const double> direction, std::int64_t n) {
  std::vector<double> nx(direction.begin(), direction.end());
  for (auto& c : nx) c *= static_cast<double>(n);
  return floor_map(nx);
}

// Point along `direction` with l1 norm as close to `norm` as flooring allows.
inline Point target_with_norm(std::span<const double> direction, std::int64_t norm) {
  double total = 0.0;
  for (double c : direction) total += c;
  std::vector<double> x(direction.begin(), direction.end());
  for (auto& c : x) c = c * static_cast<double>(norm) / total;
  return floor_map(x);
}

// Box [-m, target + m] with m = ceil(rho |target|_1), at least 1.
inline BoxLattice experiment_box(const Point& target, double rho) {
  const auto m = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(rho * static_cast<double>(l1_norm(target)))));
  Point lo(target.size(), -m), hi = target;
  for (auto& c : hi) c += m;
  return BoxLattice(lo, hi);
}

// Runs body(i) for i in [0, count) on up to `workers` threads. Callers write
// into slot i only, so the reduction order is the index order.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct ShiftOutcome {
  Rational shift;
  bool applicable = false;
  std::size_t hops = 0;    // |g|_e of the geodesic in the shifted environment
  bool premise = false;    // hops >= (1 + delta) |x|_1
  bool gap_event = false;  // t <= directed t - delta * shift * |x|_1
  bool chain_ok = false;
};

struct TrialOutcome {
  std::size_t level = 0;  // index into scales or norms
  std::size_t trial = 0;
  std::uint64_t trial_id = 0;
  std::int64_t n = 0;
  Point target;
  std::int64_t norm = 0;
  bool reachable = false;
  double t = 0.0;
  std::string t_exact;
  bool has_directed = false;
  double t_dir = 0.0;
  std::string t_dir_exact;
  std::size_t hops = 0;
  std::optional<std::size_t> pattern_count;
  bool touched_boundary = false;
  std::vector<ShiftOutcome> shifts;
  bool chain_verified = true;
  std::vector<std::string> failures;  // hard assertion failures

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["level"] = level;
    j["trial"] = trial;
    j["trial_id"] = trial_id;
    if (n) j["n"] = n;
    j["target"] = target;
    j["norm"] = norm;
    j["reachable"] = reachable;
    j["t"] = reachable ? nlohmann::json(t) : nlohmann::json("inf");
    if (!t_exact.empty()) j["t_exact"] = t_exact;
    if (has_directed) {
      j["t_dir"] = std::isinf(t_dir) ? nlohmann::json("inf") : nlohmann::json(t_dir);
      if (!t_dir_exact.empty()) j["t_dir_exact"] = t_dir_exact;
    }
    j["hops"] = hops;
    j["pattern_count"] = pattern_count ? nlohmann::json(*pattern_count) : nlohmann::json(nullptr);
    j["touched_boundary"] = touched_boundary;
    if (!shifts.empty()) {
      j["shifts"] = nlohmann::json::array();
      for (const auto& s : shifts)
        j["shifts"].push_back({{"shift", s.shift.str()},
                               {"applicable", s.applicable},
                               {"hops", s.hops},
                               {"premise", s.premise},
                               {"gap_event", s.gap_event},
                               {"chain_ok", s.chain_ok}});
      j["chain_verified"] = chain_verified;
    }
    j["failures"] = failures;
    return j;
  }
};

struct TrialPlan {
  bool directed = true;
  bool shifts = true;
};

namespace detail {

template <class Rep>
std::string exact_string(const Environment<Rep>& env, Rep t) {
  if constexpr (TimeTraits<Rep>::exact) {
    if (TimeTraits<Rep>::is_infinite(t)) return "inf";
    return Rational(t, env.scale()).str();
  } else {
    return {};
  }
}

// Scale at which the sampled law and every shift are integers.
inline std::int64_t common_scale(const DistributionSpec& spec, const std::vector<Rational>& shifts) {
  std::int64_t s = spec.common_denominator();
  for (const auto& d : shifts) s = std::lcm(s, d.den());
  return s;
}

template <class Rep>
Environment<Rep> sample_for_experiment(const ExperimentConfig& cfg, const std::vector<Rational>& shifts,
                                       const BoxLattice& box, std::uint64_t trial_id) {
  auto env = sample_environment<Rep>(cfg.spec, box, cfg.seed, trial_id);
  if constexpr (TimeTraits<Rep>::exact) {
    const auto s = common_scale(*cfg.spec, shifts);
    if (s != env.scale()) return rescale(env, s);
  }
  return env;
}

}  // namespace detail

// One sample: t, directed t, the minimal-hop geodesic and its pattern count,
// and for each shift the inequality chain. Hard assertions land in failures.
template <class Rep>
TrialOutcome run_trial(const ExperimentConfig& cfg, const std::vector<Rational>& shifts,
                       const PatternGeometry* pattern, const Point& target, std::size_t level, std::size_t trial,
                       const TrialPlan& plan) {
  using Traits = TimeTraits<Rep>;
  TrialOutcome out;
  out.level = level;
  out.trial = trial;
  out.trial_id = (static_cast<std::uint64_t>(level) << 32) | static_cast<std::uint64_t>(trial);
  out.target = target;
  out.norm = l1_norm(target);

  const BoxLattice box = experiment_box(target, cfg.rho);
  const auto env = detail::sample_for_experiment<Rep>(cfg, shifts, box, out.trial_id);
  const Point origin(target.size(), 0);

  const auto geo = geodesic_time(env, origin, target);
  out.reachable = geo.reachable;
  out.t = env.to_real(geo.time);
  out.t_exact = detail::exact_string(env, geo.time);
  out.hops = geo.min_hops;
  out.touched_boundary = geo.touched_boundary;
  if (geo.reachable) {
    if (geo.min_hops < static_cast<std::size_t>(out.norm)) out.failures.push_back("hops_below_norm");
    if (!validate_path(geo.geodesic).self_avoiding) out.failures.push_back("geodesic_not_self_avoiding");
    if (pattern) {
      out.pattern_count = find_occurrences(env, geo.geodesic, *pattern).size();
      if (!claim2_check(geo.geodesic, *out.pattern_count)) out.failures.push_back("claim2");
    }
  }

  if (!plan.directed) return out;
  const auto dir = directed_time(env, target, plan.shifts);
  out.has_directed = true;
  out.t_dir = env.to_real(dir.time);
  out.t_dir_exact = detail::exact_string(env, dir.time);
  if (!Traits::less_equal(geo.time, dir.time)) out.failures.push_back("t_le_directed_t");

  if (!plan.shifts) return out;
  for (const auto& shift : shifts) {
    const auto pair = make_shifted_pair(env, shift);
    ShiftOutcome so;
    so.shift = shift;
    const auto report = verify_inequality_chain(pair.base, pair.shifted, pair.delta_units, target, cfg.eps, geo, dir);
    so.applicable = report.applicable;
    if (report.applicable) {
      so.hops = report.shifted_hops;
      so.premise = report.premise;
      so.gap_event = report.gap_event;
      so.chain_ok = report.holds();
      if (!so.chain_ok) {
        out.chain_verified = false;
        out.failures.push_back(chain_failure_name(report.first_failure()) + "@shift=" + shift.str());
      }
      if (Traits::less(report.shifted_geodesic.time, geo.time + pair.delta_units * static_cast<Rep>(out.norm)))
        out.failures.push_back("shifted_time_monotonicity@shift=" + shift.str());
    }
    out.shifts.push_back(so);
  }
  if (out.norm <= cfg.argmin_oracle_norm) {
    for (const auto& shift : shifts)
      if (!directed_argmin_invariance_check(env, shift, target).holds())
        out.failures.push_back("directed_argmin_invariance@shift=" + shift.str());
  }
  return out;
}

struct AssertionSummary {
  std::size_t trials_checked = 0;
  std::size_t failures = 0;
  std::vector<std::string> first_failures;  // up to 20, "trial_id:name"

  bool passed() const { return failures == 0; }

  void absorb(const TrialOutcome& t) {
    ++trials_checked;
    for (const auto& f : t.failures) {
      ++failures;
      if (first_failures.size() < 20) first_failures.push_back(std::to_string(t.trial_id) + ":" + f);
    }
  }

  nlohmann::json to_json() const {
    return {{"passed", passed()}, {"trials_checked", trials_checked}, {"failures", failures},
            {"first_failures", first_failures}};
  }
};

struct GapShiftRow {
  Rational shift;
  double hops_ratio_mean = 0.0;  // mean |g|_e / |x|_1
  stats::Proportion premise;
  stats::Proportion gap_event;
};

struct GapRow {
  std::int64_t n = 0;
  Point target;
  std::int64_t norm = 0;
  stats::MeanEstimate mu_hat;      // t / n
  stats::MeanEstimate mu_dir_hat;  // directed t / n
  stats::MeanEstimate gap_hat;     // (directed t - t) / |x|_1
  stats::Proportion t_le_directed;
  stats::Proportion boundary_contact;
  double pattern_count_mean = 0.0;
  std::vector<GapShiftRow> shifts;
};

struct TailRow {
  std::int64_t requested_norm = 0;
  Point target;
  std::int64_t norm = 0;
  stats::Proportion reachable;
  stats::Proportion event;  // reachable and min hops <= (1 + delta) |x|_1
  double hops_ratio_mean = 0.0;
  double pattern_count_mean = 0.0;
  stats::Proportion boundary_contact;
};

struct TailFit {
  bool fitted = false;
  stats::ExponentialFit fit;
  bool non_increasing = true;  // up to one binomial standard error between consecutive levels
};

struct ConstantsRow {
  std::int64_t n = 0;
  Point target;
  stats::MeanEstimate mu_hat;
  stats::MeanEstimate mu_dir_hat;
  std::optional<bool> mu_subadditive;      // versus the previous (halved) scale
  std::optional<bool> mu_dir_subadditive;
  stats::Proportion boundary_contact;
};

struct ExperimentResult {
  std::string kind;
  std::vector<TrialOutcome> trials;
  std::vector<GapRow> gap_rows;
  std::vector<TailRow> tail_rows;
  TailFit tail_fit;
  std::vector<ConstantsRow> constants_rows;
  AssertionSummary assertions;
  std::optional<Pattern> pattern;
  UsefulnessFlags usefulness;
  std::vector<std::string> warnings;
};

using ProgressFn = std::function<void(const std::string&)>;

namespace detail {

template <class F>
decltype(auto) dispatch_time_rep(const DistributionSpec& spec, F&& f) {
  if (spec.exact()) return f.template operator()<ExactTime>();
  return f.template operator()<RealTime>();
}

inline void boundary_warning(ExperimentResult& res, const std::string& where, const stats::Proportion& p) {
  if (p.value() > 0.01)
    res.warnings.push_back(where + ": boundary contact rate " + std::to_string(p.value()) +
                           " exceeds 1%; increase rho");
}

inline void usefulness_warnings(ExperimentResult& res, const ExperimentConfig& cfg) {
  res.usefulness = check_useful(*cfg.spec, cfg.critical);
  const double r = cfg.spec->r();
  if (!res.usefulness.useful(r)) res.warnings.push_back("law is not useful: mass at r is above the relevant threshold");
  if (!res.usefulness.useful_directed_pc)
    res.warnings.push_back("mass at r is not below the oriented threshold; the strict gap is not guaranteed");
  if (!res.usefulness.finite_mass_supercritical)
    res.warnings.push_back("finite-weight edges are not supercritical");
}

template <class Rep>
std::vector<TrialOutcome> run_level(const ExperimentConfig& cfg, const std::vector<Rational>& shifts,
                                    const PatternGeometry* pattern, const Point& target, std::size_t level,
                                    const TrialPlan& plan) {
  std::vector<TrialOutcome> out(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t i) {
    out[i] = run_trial<Rep>(cfg, shifts, pattern, target, level, i, plan);
  });
  return out;
}

inline std::optional<PatternGeometry> make_geometry(const std::optional<Pattern>& p) {
  if (!p) return std::nullopt;
  return PatternGeometry(*p);
}

}  // namespace detail

// Strict gap between geodesic and directed geodesic times, with the
// inequality chain asserted on every sample.
inline ExperimentResult run_gap_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
  cfg.validate();
  ExperimentResult res;
  res.kind = "gap";
  detail::usefulness_warnings(res, cfg);
  res.pattern = resolve_pattern(cfg);
  const auto geometry = detail::make_geometry(res.pattern);
  const auto shifts = resolved_shifts(cfg);

  for (std::size_t level = 0; level < cfg.scales.size(); ++level) {
    const std::int64_t n = cfg.scales[level];
    const Point target = scaled_target(cfg.direction, n);
    if (progress) progress("gap: n=" + std::to_string(n) + " target=(" + format_point(target) + ")");
    auto trials = detail::dispatch_time_rep(*cfg.spec, [&]<class Rep>() {
      return detail::run_level<Rep>(cfg, shifts, geometry ? &*geometry : nullptr, target, level, TrialPlan{true, true});
    });

    GapRow row;
    row.n = n;
    row.target = target;
    row.norm = l1_norm(target);
    std::vector<double> mu, mu_dir, gap;
    double pattern_sum = 0.0;
    std::vector<double> hops_sum(shifts.size(), 0.0);
    row.shifts.resize(shifts.size());
    for (std::size_t k = 0; k < shifts.size(); ++k) row.shifts[k].shift = shifts[k];
    for (auto& t : trials) {
      t.n = n;
      res.assertions.absorb(t);
      if (std::isfinite(t.t) && std::isfinite(t.t_dir)) {
        mu.push_back(t.t / static_cast<double>(n));
        mu_dir.push_back(t.t_dir / static_cast<double>(n));
        if (row.norm > 0) gap.push_back((t.t_dir - t.t) / static_cast<double>(row.norm));
      }
      ++row.t_le_directed.trials;
      if (t.t <= t.t_dir) ++row.t_le_directed.successes;
      ++row.boundary_contact.trials;
      if (t.touched_boundary) ++row.boundary_contact.successes;
      if (t.pattern_count) pattern_sum += static_cast<double>(*t.pattern_count);
      for (std::size_t k = 0; k < t.shifts.size(); ++k) {
        const auto& s = t.shifts[k];
        if (!s.applicable) continue;
        hops_sum[k] += static_cast<double>(s.hops) / static_cast<double>(std::max<std::int64_t>(1, row.norm));
        ++row.shifts[k].premise.trials;
        ++row.shifts[k].gap_event.trials;
        if (s.premise) ++row.shifts[k].premise.successes;
        if (s.gap_event) ++row.shifts[k].gap_event.successes;
      }
    }
    row.mu_hat = stats::mean_ci(mu);
    row.mu_dir_hat = stats::mean_ci(mu_dir);
    row.gap_hat = stats::mean_ci(gap);
    row.pattern_count_mean = pattern_sum / static_cast<double>(trials.size());
    for (std::size_t k = 0; k < shifts.size(); ++k)
      if (row.shifts[k].premise.trials)
        row.shifts[k].hops_ratio_mean = hops_sum[k] / static_cast<double>(row.shifts[k].premise.trials);
    detail::boundary_warning(res, "gap n=" + std::to_string(n), row.boundary_contact);
    res.gap_rows.push_back(std::move(row));
    std::move(trials.begin(), trials.end(), std::back_inserter(res.trials));
  }
  return res;
}

// Frequency of short geodesics {reachable and min hops <= (1 + delta)|x|_1}
// against |x|_1, with an exponential fit over the positive frequencies.
inline ExperimentResult run_tail_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
  cfg.validate();
  ExperimentResult res;
  res.kind = "tail";
  detail::usefulness_warnings(res, cfg);
  res.pattern = resolve_pattern(cfg);
  const auto geometry = detail::make_geometry(res.pattern);
  const auto shifts = resolved_shifts(cfg);

  for (std::size_t level = 0; level < cfg.norms.size(); ++level) {
    const Point target = target_with_norm(cfg.direction, cfg.norms[level]);
    if (progress) progress("tail: |x|_1=" + std::to_string(cfg.norms[level]) + " target=(" + format_point(target) + ")");
    auto trials = detail::dispatch_time_rep(*cfg.spec, [&]<class Rep>() {
      return detail::run_level<Rep>(cfg, shifts, geometry ? &*geometry : nullptr, target, level,
                                    TrialPlan{false, false});
    });
    TailRow row;
    row.requested_norm = cfg.norms[level];
    row.target = target;
    row.norm = l1_norm(target);
    double hops_sum = 0.0, pattern_sum = 0.0;
    for (const auto& t : trials) {
      res.assertions.absorb(t);
      ++row.reachable.trials;
      ++row.event.trials;
      ++row.boundary_contact.trials;
      if (t.touched_boundary) ++row.boundary_contact.successes;
      if (!t.reachable) continue;
      ++row.reachable.successes;
      hops_sum += static_cast<double>(t.hops) / static_cast<double>(row.norm);
      if (t.pattern_count) pattern_sum += static_cast<double>(*t.pattern_count);
      // hops <= (1 + eps) norm, compared in exact rational form
      const auto lhs = static_cast<__int128>(t.hops) * cfg.eps.den();
      const auto rhs = static_cast<__int128>(row.norm) * (cfg.eps.den() + cfg.eps.num());
      if (lhs <= rhs) ++row.event.successes;
    }
    if (row.reachable.successes) {
      row.hops_ratio_mean = hops_sum / static_cast<double>(row.reachable.successes);
      row.pattern_count_mean = pattern_sum / static_cast<double>(row.reachable.successes);
    }
    detail::boundary_warning(res, "tail |x|_1=" + std::to_string(row.norm), row.boundary_contact);
    res.tail_rows.push_back(std::move(row));
    std::move(trials.begin(), trials.end(), std::back_inserter(res.trials));
  }

  for (std::size_t i = 1; i < res.tail_rows.size(); ++i) {
    const auto& prev = res.tail_rows[i - 1].event;
    const auto& cur = res.tail_rows[i].event;
    const double se = std::sqrt(prev.standard_error() * prev.standard_error() + cur.standard_error() * cur.standard_error());
    if (cur.value() > prev.value() + se) res.tail_fit.non_increasing = false;
  }
  std::vector<double> x;
  std::vector<stats::Proportion> f;
  for (const auto& row : res.tail_rows) {
    if (row.event.successes == 0) continue;
    x.push_back(static_cast<double>(row.norm));
    f.push_back(row.event);
  }
  if (x.size() >= 2) {
    res.tail_fit.fit = stats::fit_exponential_tail(x, f);
    res.tail_fit.fitted = true;
  } else {
    res.warnings.push_back("tail fit skipped: fewer than two levels with positive frequency");
  }
  return res;
}

// Mean t(0, nx)/n and directed t(0, nx)/n along the given scales; consecutive
// scales are compared for the subadditive decrease up to confidence overlap.
inline ExperimentResult estimate_time_constants(const ExperimentConfig& cfg, const ProgressFn& progress = {}) {
  cfg.validate();
  ExperimentResult res;
  res.kind = "constants";
  detail::usefulness_warnings(res, cfg);
  if (std::isinf(cfg.spec->mean())) res.warnings.push_back("law has infinite mean; time constants are not defined");
  res.pattern = resolve_pattern(cfg);
  const auto shifts = resolved_shifts(cfg);

  for (std::size_t level = 0; level < cfg.scales.size(); ++level) {
    const std::int64_t n = cfg.scales[level];
    const Point target = scaled_target(cfg.direction, n);
    if (progress) progress("constants: n=" + std::to_string(n));
    auto trials = detail::dispatch_time_rep(*cfg.spec, [&]<class Rep>() {
      return detail::run_level<Rep>(cfg, shifts, nullptr, target, level, TrialPlan{true, false});
    });
    ConstantsRow row;
    row.n = n;
    row.target = target;
    std::vector<double> mu, mu_dir;
    for (auto& t : trials) {
      t.n = n;
      res.assertions.absorb(t);
      if (std::isfinite(t.t)) mu.push_back(t.t / static_cast<double>(n));
      if (std::isfinite(t.t_dir)) mu_dir.push_back(t.t_dir / static_cast<double>(n));
      ++row.boundary_contact.trials;
      if (t.touched_boundary) ++row.boundary_contact.successes;
    }
    row.mu_hat = stats::mean_ci(mu);
    row.mu_dir_hat = stats::mean_ci(mu_dir);
    if (!res.constants_rows.empty()) {
      const auto& prev = res.constants_rows.back();
      row.mu_subadditive = row.mu_hat.mean <= prev.mu_hat.mean + prev.mu_hat.half_width + row.mu_hat.half_width;
      row.mu_dir_subadditive =
          row.mu_dir_hat.mean <= prev.mu_dir_hat.mean + prev.mu_dir_hat.half_width + row.mu_dir_hat.half_width;
    }
    detail::boundary_warning(res, "constants n=" + std::to_string(n), row.boundary_contact);
    res.constants_rows.push_back(std::move(row));
    std::move(trials.begin(), trials.end(), std::back_inserter(res.trials));
  }
  return res;
}

}  // namespace fpp
