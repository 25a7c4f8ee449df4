#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpp/distribution.hpp"
#include "fpp/lattice.hpp"
#include "fpp/rational.hpp"
#include "fpp/rng.hpp"

namespace fpp {

// Arithmetic of passage times. Exact mode carries times as 64-bit integers in
// units of 1/scale; real mode carries doubles. Both have an absorbing infinity
// that compares greater than every finite value.
template <class Rep>
struct TimeTraits;

template <>
struct TimeTraits<std::int64_t> {
  static constexpr std::int64_t infinity() { return std::numeric_limits<std::int64_t>::max(); }
  static constexpr bool is_infinite(std::int64_t t) { return t == infinity(); }
  static constexpr std::int64_t add(std::int64_t a, std::int64_t b) {
    return (is_infinite(a) || is_infinite(b)) ? infinity() : a + b;
  }
  static constexpr bool equal(std::int64_t a, std::int64_t b) { return a == b; }
  static constexpr bool less_equal(std::int64_t a, std::int64_t b) { return a <= b; }
  static constexpr bool less(std::int64_t a, std::int64_t b) { return a < b; }
  static constexpr bool exact = true;
};

template <>
struct TimeTraits<double> {
  static constexpr double kTolerance = 1e-9;
  static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }
  static bool is_infinite(double t) { return std::isinf(t); }
  static double add(double a, double b) { return a + b; }
  static bool equal(double a, double b) {
    if (a == b) return true;
    if (std::isinf(a) || std::isinf(b)) return false;
    return std::abs(a - b) <= kTolerance * std::max({1.0, std::abs(a), std::abs(b)});
  }
  static bool less_equal(double a, double b) { return a <= b || equal(a, b); }
  static bool less(double a, double b) { return a < b && !equal(a, b); }
  static constexpr bool exact = false;
};

using ExactTime = std::int64_t;
using RealTime = double;

// Passage times on every edge of a box. Immutable once built.
template <class Rep>
class Environment {
 public:
  using Traits = TimeTraits<Rep>;

  Environment(BoxLattice lattice, std::vector<Rep> weights, Rep scale = Rep{1}, std::uint64_t seed = 0,
              std::uint64_t trial_id = 0, std::shared_ptr<const DistributionSpec> spec = nullptr)
      : lattice_(std::move(lattice)),
        weights_(std::move(weights)),
        scale_(scale),
        seed_(seed),
        trial_id_(trial_id),
        spec_(std::move(spec)) {
    if (weights_.size() != lattice_.edge_slot_count())
      throw std::invalid_argument("Environment: weight array does not match the box edge slots");
  }

  // Every edge of `lattice` carries `value`; invalid slots hold infinity.
  static Environment constant(BoxLattice lattice, Rep value, Rep scale = Rep{1}) {
    std::vector<Rep> w(lattice.edge_slot_count(), Traits::infinity());
    for (std::size_t s = 0; s < w.size(); ++s)
      if (lattice.edge_slot_valid(s)) w[s] = value;
    return Environment(std::move(lattice), std::move(w), scale);
  }

  const BoxLattice& lattice() const { return lattice_; }
  std::span<const Rep> weights() const { return weights_; }
  Rep weight(std::size_t slot) const { return weights_[slot]; }
  Rep weight(const Point& a, const Point& b) const { return weights_[lattice_.edge_between(a, b)]; }
  Rep scale() const { return scale_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial_id() const { return trial_id_; }
  const std::shared_ptr<const DistributionSpec>& spec() const { return spec_; }

  double to_real(Rep t) const {
    if (Traits::is_infinite(t)) return std::numeric_limits<double>::infinity();
    return static_cast<double>(t) / static_cast<double>(scale_);
  }
  double real_weight(const Point& a, const Point& b) const { return to_real(weight(a, b)); }

 private:
  BoxLattice lattice_;
  std::vector<Rep> weights_;
  Rep scale_;
  std::uint64_t seed_;
  std::uint64_t trial_id_;
  std::shared_ptr<const DistributionSpec> spec_;
};

using ExactEnvironment = Environment<ExactTime>;
using RealEnvironment = Environment<RealTime>;

namespace detail {

// Index of the atom or piece selected by u, in declaration order (atoms first).
inline std::size_t select_component(const DistributionSpec& spec, double u) {
  double acc = 0.0;
  const std::size_t n = spec.atoms().size() + spec.pieces().size();
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = i < spec.atoms().size() ? spec.atoms()[i].probability
                                             : spec.pieces()[i - spec.atoms().size()].probability;
    if (p <= 0) continue;
    last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace detail

// One i.i.d. draw per edge; the weight of edge slot e is a pure function of
// (seed, trial_id, e). Exact mode requires an exact spec and uses the common
// denominator of the atoms as scale.
template <class Rep>
Environment<Rep> sample_environment(std::shared_ptr<const DistributionSpec> spec, const BoxLattice& lattice,
                                    std::uint64_t seed, std::uint64_t trial_id) {
  using Traits = TimeTraits<Rep>;
  if (!spec) throw std::invalid_argument("sample_environment: null spec");
  Rep scale{1};
  std::vector<Rep> table(spec->atoms().size());
  if constexpr (Traits::exact) {
    if (!spec->exact()) throw std::invalid_argument("sample_environment: spec is not exact; use real mode");
    scale = spec->common_denominator();
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& a = spec->atoms()[i];
      table[i] = a.infinite ? Traits::infinity() : a.exact->num() * (scale / a.exact->den());
    }
  } else {
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = spec->atoms()[i].value;
  }

  const CounterRng rng{seed, trial_id};
  std::vector<Rep> w(lattice.edge_slot_count(), Traits::infinity());
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (!lattice.edge_slot_valid(s)) continue;
    const auto u = rng.uniforms(s);
    const std::size_t c = detail::select_component(*spec, u[0]);
    if (c < table.size()) {
      w[s] = table[c];
    } else if constexpr (!Traits::exact) {
      const auto& piece = spec->pieces()[c - table.size()];
      w[s] = piece.low + u[1] * (piece.high - piece.low);
    }
  }
  return Environment<Rep>(lattice, std::move(w), scale, seed, trial_id, std::move(spec));
}

// Adds delta to every finite weight. In exact mode the environment is rescaled
// first when delta is not a multiple of 1/scale.
inline ExactEnvironment shift_environment(const ExactEnvironment& env, Rational delta) {
  using Traits = TimeTraits<ExactTime>;
  if (delta <= Rational(0)) throw std::invalid_argument("shift_environment: delta must be > 0");
  const std::int64_t s = env.scale();
  const std::int64_t factor = delta.den() / std::gcd(s, delta.den());
  const std::int64_t new_scale = s * factor;
  const std::int64_t add = delta.num() * (new_scale / delta.den());
  std::vector<ExactTime> w(env.weights().begin(), env.weights().end());
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!Traits::is_infinite(w[i])) w[i] = w[i] * factor + add;
  std::shared_ptr<const DistributionSpec> spec;
  if (env.spec()) spec = std::make_shared<const DistributionSpec>(env.spec()->shifted(delta));
  return ExactEnvironment(env.lattice(), std::move(w), new_scale, env.seed(), env.trial_id(), std::move(spec));
}

inline RealEnvironment shift_environment(const RealEnvironment& env, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("shift_environment: delta must be > 0");
  std::vector<RealTime> w(env.weights().begin(), env.weights().end());
  for (auto& x : w)
    if (!std::isinf(x)) x += delta;
  std::shared_ptr<const DistributionSpec> spec;
  if (env.spec()) spec = std::make_shared<const DistributionSpec>(env.spec()->shifted(delta));
  return RealEnvironment(env.lattice(), std::move(w), 1.0, env.seed(), env.trial_id(), std::move(spec));
}

inline RealEnvironment shift_environment(const RealEnvironment& env, Rational delta) {
  return shift_environment(env, delta.to_double());
}

// Same weights expressed at a finer scale (new_scale must be a multiple).
inline ExactEnvironment rescale(const ExactEnvironment& env, std::int64_t new_scale) {
  if (new_scale % env.scale() != 0) throw std::invalid_argument("rescale: new scale must be a multiple");
  const std::int64_t factor = new_scale / env.scale();
  std::vector<ExactTime> w(env.weights().begin(), env.weights().end());
  for (auto& x : w)
    if (!TimeTraits<ExactTime>::is_infinite(x)) x *= factor;
  return ExactEnvironment(env.lattice(), std::move(w), new_scale, env.seed(), env.trial_id(), env.spec());
}

// Sum of weights along p; infinity if any edge is infinite. Throws if p leaves the box.
template <class Rep>
Rep path_time(const Environment<Rep>& env, const LatticePath& p) {
  Rep total{0};
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    const auto& a = p.vertices[i];
    const auto& b = p.vertices[i + 1];
    if (!env.lattice().contains(a) || !env.lattice().contains(b))
      throw std::out_of_range("path_time: path leaves the environment box");
    total = TimeTraits<Rep>::add(total, env.weight(a, b));
  }
  if (p.vertices.size() == 1 && !env.lattice().contains(p.vertices[0]))
    throw std::out_of_range("path_time: path leaves the environment box");
  return total;
}

// Edge-weight dump for audits: one row per valid edge, lower endpoint and axis.
template <class Rep>
void write_edge_csv(std::ostream& os, const Environment<Rep>& env) {
  const auto& box = env.lattice();
  const int d = box.dim();
  os << "edge";
  for (int j = 0; j < d; ++j) os << ",x" << (j + 1);
  os << ",axis,weight\n";
  for (std::size_t s = 0; s < box.edge_slot_count(); ++s) {
    if (!box.edge_slot_valid(s)) continue;
    const Point z = box.point(s / static_cast<std::size_t>(d));
    os << s;
    for (auto c : z) os << ',' << c;
    os << ',' << (s % static_cast<std::size_t>(d) + 1) << ',';
    const Rep w = env.weight(s);
    if (TimeTraits<Rep>::is_infinite(w)) {
      os << "inf";
    } else if constexpr (TimeTraits<Rep>::exact) {
      os << Rational(w, env.scale()).str();
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", w);
      os << buf;
    }
    os << '\n';
  }
}

// Flat binary dump: magic, dim, lo, hi, scale, then one 8-byte weight per slot.
template <class Rep>
void write_edge_binary(std::ostream& os, const Environment<Rep>& env) {
  auto put = [&os](auto v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
  os.write(TimeTraits<Rep>::exact ? "FPPENVI1" : "FPPENVR1", 8);
  const auto& box = env.lattice();
  put(static_cast<std::int64_t>(box.dim()));
  for (auto c : box.lo()) put(static_cast<std::int64_t>(c));
  for (auto c : box.hi()) put(static_cast<std::int64_t>(c));
  put(env.scale());
  for (auto w : env.weights()) put(w);
}

}  // namespace fpp
