#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpp/distribution.hpp"
#include "fpp/experiment.hpp"
#include "fpp/rational.hpp"

namespace fpp {

// Run files are JSON. The distribution sits under "distribution"; a file with
// only "atoms"/"uniform" at top level is read as a bare distribution.
//
// {"distribution": {...}, "critical": {"p_c": .., "p_c_directed": ..},
//  "direction": [1, 1], "scales": [50], "shifts": ["1/2", 1], "delta": "1/20",
//  "norms": [20, 40], "trials": 100, "seed": 1, "rho": 0.5,
//  "pattern": {"length": 3, "a": 1, "b": 2, "delta": 0.05}}
inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline Rational rational_from_json(const nlohmann::json& v, const char* what) {
  if (auto r = detail::exact_from_json(v)) return *r;
  throw std::invalid_argument(std::string(what) + ": expected a number or \"p/q\"");
}

inline Rational parse_rational_arg(const std::string& s, const char* what) {
  if (auto r = parse_rational(s)) return *r;
  throw std::invalid_argument(std::string(what) + ": cannot parse '" + s + "'");
}

inline Pattern pattern_from_json(const nlohmann::json& j, int dim) {
  if (j.value("kind", std::string("standard")) == "infinite") return Pattern::infinite(dim, j.at("a").get<double>());
  return Pattern::standard(dim, j.at("length").get<std::int64_t>(), j.at("a").get<double>(), j.at("b").get<double>(),
                           j.value("delta", 0.0));
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const auto& dist = j.contains("distribution") ? j.at("distribution") : j;
  cfg.spec = std::make_shared<const DistributionSpec>(distribution_from_json(dist));
  if (j.contains("direction")) cfg.direction = j.at("direction").get<std::vector<double>>();
  cfg.critical = critical_from_json(j, cfg.dim());
  if (j.contains("scales")) cfg.scales = j.at("scales").get<std::vector<std::int64_t>>();
  if (j.contains("norms")) cfg.norms = j.at("norms").get<std::vector<std::int64_t>>();
  if (j.contains("shifts")) {
    cfg.shifts.clear();
    for (const auto& s : j.at("shifts")) cfg.shifts.push_back(rational_from_json(s, "shifts"));
  }
  if (j.contains("delta")) cfg.eps = rational_from_json(j.at("delta"), "delta");
  if (j.contains("trials")) {
    const auto t = j.at("trials").get<std::int64_t>();
    if (t <= 0) throw std::invalid_argument("trials must be positive");
    cfg.trials = static_cast<std::size_t>(t);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.argmin_oracle_norm = j.value("argmin_oracle_norm", cfg.argmin_oracle_norm);
  if (j.contains("pattern")) cfg.pattern = pattern_from_json(j.at("pattern"), cfg.dim());
  return cfg;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace fpp
