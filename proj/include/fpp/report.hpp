#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpp/experiment.hpp"
#include "fpp/version.hpp"

namespace fpp::report {

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Hash of the canonical (key-sorted) JSON form of a run configuration.
inline std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// CSV with a self-describing preamble of '#' lines, then header and rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const nlohmann::json& config) : os_(os) {
    os_ << "# tool=" << kToolName << " version=" << kToolVersion << " config_hash=" << config_hash(config) << '\n';
    os_ << "# config=" << config.dump() << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << ',';
      os_ << csv_field(fields[i]);
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

inline nlohmann::json header_record(const std::string& kind, const nlohmann::json& config) {
  return {{"record", "header"},
          {"kind", kind},
          {"tool", kToolName},
          {"version", kToolVersion},
          {"config_hash", config_hash(config)},
          {"config", config}};
}

inline std::string point_field(const Point& p) { return format_point(p); }

inline void write_trials_jsonl(std::ostream& os, const ExperimentResult& res, const nlohmann::json& config) {
  os << header_record(res.kind, config).dump() << '\n';
  for (const auto& t : res.trials) {
    auto j = t.to_json();
    j["record"] = "trial";
    os << j.dump() << '\n';
  }
}

inline void write_gap_csv(std::ostream& os, const ExperimentResult& res, const nlohmann::json& config) {
  CsvWriter csv(os, config);
  csv.row({"n", "target", "norm", "trials", "mu_hat", "mu_hat_ci_lo", "mu_hat_ci_hi", "mu_dir_hat", "mu_dir_hat_ci_lo",
           "mu_dir_hat_ci_hi", "gap_hat", "gap_ci_lo", "gap_ci_hi", "t_le_directed_freq", "boundary_contact_rate",
           "pattern_count_mean", "shift", "shifted_hops_ratio_mean", "premise_freq", "gap_event_freq"});
  for (const auto& r : res.gap_rows) {
    for (const auto& s : r.shifts) {
      csv.row({std::to_string(r.n), point_field(r.target), std::to_string(r.norm), std::to_string(r.mu_hat.count),
               format_double(r.mu_hat.mean), format_double(r.mu_hat.lower()), format_double(r.mu_hat.upper()),
               format_double(r.mu_dir_hat.mean), format_double(r.mu_dir_hat.lower()),
               format_double(r.mu_dir_hat.upper()), format_double(r.gap_hat.mean), format_double(r.gap_hat.lower()),
               format_double(r.gap_hat.upper()), format_double(r.t_le_directed.value()),
               format_double(r.boundary_contact.value()), format_double(r.pattern_count_mean), s.shift.str(),
               format_double(s.hops_ratio_mean), format_double(s.premise.value()), format_double(s.gap_event.value())});
    }
  }
}

inline void write_tail_csv(std::ostream& os, const ExperimentResult& res, const nlohmann::json& config) {
  CsvWriter csv(os, config);
  csv.row({"requested_norm", "target", "norm", "trials", "reachable_freq", "event_count", "event_freq", "event_se",
           "zero_upper_bound", "hops_ratio_mean", "pattern_count_mean", "boundary_contact_rate"});
  for (const auto& r : res.tail_rows) {
    // a zero row only bounds the probability: 3/N is the 95% "rule of three" bound
    const std::string bound =
        r.event.successes == 0 ? format_double(3.0 / static_cast<double>(r.event.trials)) : std::string();
    csv.row({std::to_string(r.requested_norm), point_field(r.target), std::to_string(r.norm),
             std::to_string(r.event.trials), format_double(r.reachable.value()), std::to_string(r.event.successes),
             format_double(r.event.value()), format_double(r.event.standard_error()), bound,
             format_double(r.hops_ratio_mean), format_double(r.pattern_count_mean),
             format_double(r.boundary_contact.value())});
  }
}

inline void write_tail_fit_csv(std::ostream& os, const ExperimentResult& res, const nlohmann::json& config) {
  CsvWriter csv(os, config);
  csv.row({"fitted", "alpha1_hat", "alpha2_hat", "points", "non_increasing"});
  const auto& f = res.tail_fit;
  csv.row({f.fitted ? "1" : "0", f.fitted ? format_double(f.fit.alpha1) : "", f.fitted ? format_double(f.fit.alpha2) : "",
           std::to_string(f.fit.points), f.non_increasing ? "1" : "0"});
}

inline void write_constants_csv(std::ostream& os, const ExperimentResult& res, const nlohmann::json& config) {
  CsvWriter csv(os, config);
  csv.row({"n", "target", "trials", "mu_hat", "mu_hat_ci_lo", "mu_hat_ci_hi", "mu_dir_hat", "mu_dir_hat_ci_lo",
           "mu_dir_hat_ci_hi", "mu_subadditive", "mu_dir_subadditive", "boundary_contact_rate"});
  auto flag = [](const std::optional<bool>& b) { return b ? std::string(*b ? "1" : "0") : std::string(); };
  for (const auto& r : res.constants_rows) {
    csv.row({std::to_string(r.n), point_field(r.target), std::to_string(r.mu_hat.count), format_double(r.mu_hat.mean),
             format_double(r.mu_hat.lower()), format_double(r.mu_hat.upper()), format_double(r.mu_dir_hat.mean),
             format_double(r.mu_dir_hat.lower()), format_double(r.mu_dir_hat.upper()), flag(r.mu_subadditive),
             flag(r.mu_dir_subadditive), format_double(r.boundary_contact.value())});
  }
}

inline nlohmann::json assertions_record(const ExperimentResult& res, const nlohmann::json& config) {
  auto j = header_record(res.kind, config);
  j["record"] = "assertions";
  j["assertions"] = res.assertions.to_json();
  j["warnings"] = res.warnings;
  j["usefulness"] = {{"useful_pc", res.usefulness.useful_pc},
                     {"useful_directed_pc", res.usefulness.useful_directed_pc},
                     {"finite_mass_supercritical", res.usefulness.finite_mass_supercritical}};
  j["pattern"] = res.pattern ? res.pattern->to_json() : nlohmann::json(nullptr);
  return j;
}

// Writes <kind>_trials.jsonl, <kind>_summary.csv (and tail_fit.csv) and
// <kind>_assertions.json under dir. Returns the written paths.
inline std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir, const ExperimentResult& res,
                                                           const nlohmann::json& config) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::string& name) {
    written.push_back(dir / name);
    std::ofstream f(written.back(), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + written.back().string());
    return f;
  };
  {
    auto f = open(res.kind + "_trials.jsonl");
    write_trials_jsonl(f, res, config);
  }
  {
    auto f = open(res.kind + "_summary.csv");
    if (res.kind == "gap") write_gap_csv(f, res, config);
    if (res.kind == "tail") write_tail_csv(f, res, config);
    if (res.kind == "constants") write_constants_csv(f, res, config);
  }
  if (res.kind == "tail") {
    auto f = open("tail_fit.csv");
    write_tail_fit_csv(f, res, config);
  }
  {
    auto f = open(res.kind + "_assertions.json");
    f << assertions_record(res, config).dump(2) << '\n';
  }
  return written;
}

}  // namespace fpp::report
