#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpp/rational.hpp"

namespace fpp {

// One atom of the edge law. `exact` is set whenever the value is a finite
// terminating decimal or fraction; infinite atoms carry no value.
struct Atom {
  bool infinite = false;
  double value = 0.0;
  std::optional<Rational> exact;
  double probability = 0.0;

  static Atom finite(Rational v, double p) { return Atom{false, v.to_double(), v, p}; }
  static Atom real(double v, double p) { return Atom{false, v, std::nullopt, p}; }
  static Atom infinity(double p) { return Atom{true, std::numeric_limits<double>::infinity(), std::nullopt, p}; }
};

struct UniformPiece {
  double low = 0.0;
  double high = 0.0;
  double probability = 0.0;
};

// Edge-weight law as a mixture of atoms and uniform pieces on [0, inf].
class DistributionSpec {
 public:
  static constexpr double kProbabilityTolerance = 1e-9;

  DistributionSpec() = default;
  DistributionSpec(std::vector<Atom> atoms, std::vector<UniformPiece> pieces = {})
      : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
    validate();
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<UniformPiece>& pieces() const { return pieces_; }

  // True when every atom is an exact rational (or infinite) and there are no
  // continuous pieces, so environments can be carried as scaled integers.
  bool exact() const {
    if (!pieces_.empty()) return false;
    return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.infinite || a.exact; });
  }

  // Least common denominator of all finite atom values (exact specs only).
  std::int64_t common_denominator() const {
    std::int64_t l = 1;
    for (const auto& a : atoms_)
      if (!a.infinite && a.exact) l = std::lcm(l, a.exact->den());
    return l;
  }

  // Minimum of the support.
  double r() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_)
      if (a.probability > 0) m = std::min(m, a.value);
    for (const auto& p : pieces_)
      if (p.probability > 0) m = std::min(m, p.low);
    return m;
  }

  std::optional<Rational> r_exact() const {
    if (!exact()) return std::nullopt;
    std::optional<Rational> best;
    for (const auto& a : atoms_)
      if (!a.infinite && a.probability > 0 && (!best || *a.exact < *best)) best = a.exact;
    return best;
  }

  double mass_at(double v) const {
    double m = 0.0;
    for (const auto& a : atoms_)
      if (a.value == v) m += a.probability;
    return m;
  }
  double mass_at_r() const { return mass_at(r()); }
  double mass_infinite() const {
    double m = 0.0;
    for (const auto& a : atoms_)
      if (a.infinite) m += a.probability;
    return m;
  }
  double mass_finite() const { return 1.0 - mass_infinite(); }

  double mean() const {
    if (mass_infinite() > 0) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (const auto& a : atoms_) m += a.value * a.probability;
    for (const auto& p : pieces_) m += 0.5 * (p.low + p.high) * p.probability;
    return m;
  }

  // Sorted distinct finite atom values with positive mass.
  std::vector<double> finite_atom_values() const {
    std::vector<double> v;
    for (const auto& a : atoms_)
      if (!a.infinite && a.probability > 0) v.push_back(a.value);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  std::vector<Rational> finite_atom_exact_values() const {
    std::vector<Rational> v;
    for (const auto& a : atoms_)
      if (!a.infinite && a.probability > 0 && a.exact) v.push_back(*a.exact);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  bool in_support(double x) const {
    if (std::isinf(x)) return mass_infinite() > 0;
    for (const auto& a : atoms_)
      if (!a.infinite && a.probability > 0 && a.value == x) return true;
    for (const auto& p : pieces_)
      if (p.probability > 0 && x >= p.low && x <= p.high) return true;
    return false;
  }

  // Law of T(e) + delta.
  DistributionSpec shifted(Rational delta) const {
    DistributionSpec out = *this;
    for (auto& a : out.atoms_) {
      if (a.infinite) continue;
      if (a.exact) {
        a.exact = *a.exact + delta;
        a.value = a.exact->to_double();
      } else {
        a.value += delta.to_double();
      }
    }
    for (auto& p : out.pieces_) {
      p.low += delta.to_double();
      p.high += delta.to_double();
    }
    return out;
  }
  DistributionSpec shifted(double delta) const {
    DistributionSpec out = *this;
    for (auto& a : out.atoms_) {
      if (a.infinite) continue;
      a.value += delta;
      a.exact.reset();
    }
    for (auto& p : out.pieces_) {
      p.low += delta;
      p.high += delta;
    }
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : atoms_) {
      nlohmann::json aj;
      if (a.infinite)
        aj["value"] = "inf";
      else if (a.exact)
        aj["value"] = a.exact->str();
      else
        aj["value"] = a.value;
      aj["probability"] = a.probability;
      j["atoms"].push_back(aj);
    }
    if (!pieces_.empty()) {
      j["uniform"] = nlohmann::json::array();
      for (const auto& p : pieces_)
        j["uniform"].push_back({{"low", p.low}, {"high", p.high}, {"probability", p.probability}});
    }
    return j;
  }

 private:
  void validate() const {
    double total = 0.0;
    if (atoms_.empty() && pieces_.empty()) throw std::invalid_argument("DistributionSpec: empty law");
    for (const auto& a : atoms_) {
      if (!(a.probability >= 0.0)) throw std::invalid_argument("DistributionSpec: negative probability");
      if (!a.infinite && !(a.value >= 0.0 && std::isfinite(a.value)))
        throw std::invalid_argument("DistributionSpec: finite atom values must be >= 0");
      total += a.probability;
    }
    for (const auto& p : pieces_) {
      if (!(p.probability >= 0.0)) throw std::invalid_argument("DistributionSpec: negative probability");
      if (!(p.low >= 0.0 && p.high > p.low && std::isfinite(p.high)))
        throw std::invalid_argument("DistributionSpec: uniform piece needs 0 <= low < high < inf");
      total += p.probability;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance)
      throw std::invalid_argument("DistributionSpec: probabilities sum to " + std::to_string(total));
  }

  std::vector<Atom> atoms_;
  std::vector<UniformPiece> pieces_;
};

// Literature values of the bond percolation thresholds. They are inputs to the
// usefulness checks, never computed here.
struct CriticalConstants {
  double p_c = 0.5;
  double p_c_directed = 0.6447;
  std::string provenance = "d=2 defaults: p_c = 1/2 (exact), oriented p_c = 0.6447 (numerical estimate)";

  static std::optional<CriticalConstants> defaults(int dim) {
    if (dim == 2) return CriticalConstants{};
    return std::nullopt;
  }

  void validate() const {
    if (!(p_c > 0.0 && p_c <= p_c_directed && p_c_directed < 1.0))
      throw std::invalid_argument("CriticalConstants: need 0 < p_c <= p_c_directed < 1");
  }
};

struct UsefulnessFlags {
  bool useful_pc = false;
  bool useful_directed_pc = false;
  bool finite_mass_supercritical = false;

  // The law is useful in the sense required for geodesics to exist: the
  // threshold that applies depends on whether r = 0.
  bool useful(double r) const { return r == 0.0 ? useful_pc : useful_directed_pc; }
};

inline UsefulnessFlags check_useful(const DistributionSpec& spec, const CriticalConstants& crit) {
  const double at_r = spec.mass_at_r();
  return UsefulnessFlags{at_r < crit.p_c, at_r < crit.p_c_directed, spec.mass_finite() > crit.p_c};
}

namespace detail {

inline std::optional<Rational> exact_from_json(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) {
    // shortest round-trip decimal, so 0.1 in the file means 1/10
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  }
  return std::nullopt;
}

inline double probability_from_json(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    if (auto r = parse_rational(v.get<std::string>())) return r->to_double();
  }
  throw std::invalid_argument("DistributionSpec: probability must be a number or a fraction string");
}

}  // namespace detail

// {"atoms": [{"value": 1, "probability": 0.5}, {"value": "inf", "probability": 0.5}],
//  "uniform": [{"low": 0, "high": 1, "probability": 0.0}]}
inline DistributionSpec distribution_from_json(const nlohmann::json& j) {
  std::vector<Atom> atoms;
  std::vector<UniformPiece> pieces;
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms")) {
      const auto& v = a.at("value");
      const double p = detail::probability_from_json(a.at("probability"));
      if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
        atoms.push_back(Atom::infinity(p));
      } else if (auto exact = detail::exact_from_json(v)) {
        atoms.push_back(Atom::finite(*exact, p));
      } else if (v.is_number()) {
        atoms.push_back(Atom::real(v.get<double>(), p));
      } else if (v.is_string()) {
        atoms.push_back(Atom::real(std::stod(v.get<std::string>()), p));
      } else {
        throw std::invalid_argument("DistributionSpec: unreadable atom value");
      }
    }
  }
  if (j.contains("uniform")) {
    for (const auto& u : j.at("uniform"))
      pieces.push_back(UniformPiece{u.at("low").get<double>(), u.at("high").get<double>(),
                                    detail::probability_from_json(u.at("probability"))});
  }
  return DistributionSpec(std::move(atoms), std::move(pieces));
}

inline CriticalConstants critical_from_json(const nlohmann::json& j, int dim) {
  if (!j.contains("critical")) {
    auto def = CriticalConstants::defaults(dim);
    if (!def)
      throw std::invalid_argument("critical constants must be supplied for d = " + std::to_string(dim));
    return *def;
  }
  const auto& c = j.at("critical");
  CriticalConstants out;
  out.p_c = c.at("p_c").get<double>();
  out.p_c_directed = c.at("p_c_directed").get<double>();
  out.provenance = c.value("provenance", std::string("user supplied"));
  out.validate();
  return out;
}

}  // namespace fpp
