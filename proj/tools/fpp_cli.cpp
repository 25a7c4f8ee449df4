// fpp-lab: first-passage percolation experiments on finite boxes of Z^d.
//
// Exit codes: 0 pass, 1 hard assertion failure, 2 usage or configuration error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpp/config.hpp"
#include "fpp/directed.hpp"
#include "fpp/environment.hpp"
#include "fpp/experiment.hpp"
#include "fpp/geodesic.hpp"
#include "fpp/report.hpp"
#include "fpp/verify.hpp"
#include "fpp/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string spec_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::uint64_t trial = 0;
  std::string target;
  std::optional<double> rho;
  std::string path_csv;
  std::string direction;
  std::string scales;
  std::string norms;
  std::string shifts;
  std::string delta;
  std::optional<std::int64_t> trials;
  std::optional<unsigned> workers;
  std::optional<std::int64_t> argmin_oracle_norm;
  // verify
  std::optional<std::size_t> oracle_envs;
  std::optional<std::size_t> chain_trials;
  std::optional<std::int64_t> chain_scale;
  std::optional<std::size_t> random_walks;
  std::optional<std::int64_t> pattern_length;
  std::optional<double> pattern_a;
  std::optional<double> pattern_b;
  bool corrupt_shift = false;
};

fpp::Point parse_target(const std::string& s) {
  fpp::Point p;
  for (const auto& item : fpp::split_list(s)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw UsageError("--target: not an integer: " + item);
    }
    if (used != item.size()) throw UsageError("--target: not an integer: " + item);
    if (v < 0) throw UsageError("--target: coordinates must be >= 0");
    p.push_back(v);
  }
  if (p.size() < 2) throw UsageError("--target: need at least 2 coordinates");
  return p;
}

template <class T>
std::vector<T> parse_int_list(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const auto& item : fpp::split_list(s)) {
    try {
      out.push_back(static_cast<T>(std::stoll(item)));
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": not an integer: " + item);
    }
  }
  return out;
}

// Config file first, then command-line overrides.
fpp::ExperimentConfig load_config(const Options& o) {
  auto cfg = fpp::experiment_config_from_json(fpp::read_json_file(o.spec_path));
  if (!o.direction.empty()) {
    cfg.direction.clear();
    for (const auto& item : fpp::split_list(o.direction)) cfg.direction.push_back(std::stod(item));
  }
  if (!o.scales.empty()) cfg.scales = parse_int_list<std::int64_t>(o.scales, "--scales");
  if (!o.norms.empty()) cfg.norms = parse_int_list<std::int64_t>(o.norms, "--norms");
  if (!o.shifts.empty()) {
    cfg.shifts.clear();
    for (const auto& item : fpp::split_list(o.shifts)) cfg.shifts.push_back(fpp::parse_rational_arg(item, "--shifts"));
  }
  if (!o.delta.empty()) cfg.eps = fpp::parse_rational_arg(o.delta, "--delta");
  if (o.trials) {
    if (*o.trials <= 0) throw UsageError("--trials must be positive");
    cfg.trials = static_cast<std::size_t>(*o.trials);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.rho) cfg.rho = *o.rho;
  if (o.workers) cfg.workers = *o.workers;
  if (o.argmin_oracle_norm) cfg.argmin_oracle_norm = *o.argmin_oracle_norm;
  if (o.pattern_length || o.pattern_a || o.pattern_b) {
    if (!(o.pattern_length && o.pattern_a && o.pattern_b))
      throw UsageError("--pattern-length, --pattern-a and --pattern-b go together");
    cfg.pattern = fpp::Pattern::standard(cfg.dim(), *o.pattern_length, *o.pattern_a, *o.pattern_b);
  }
  cfg.validate();
  return cfg;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
    std::filesystem::create_directories(parent);
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

void write_path_csv(const std::string& path, const fpp::LatticePath& p, const nlohmann::json& config) {
  if (path.empty()) return;
  std::ofstream f;
  auto& os = open_output(path, f);
  fpp::report::CsvWriter csv(os, config);
  std::vector<std::string> header{"step"};
  for (std::size_t k = 0; k < p.source().size(); ++k) header.push_back("x" + std::to_string(k + 1));
  csv.row(header);
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (auto c : p.vertices[i]) row.push_back(std::to_string(c));
    csv.row(row);
  }
}

nlohmann::json single_config(const std::string& command, const fpp::ExperimentConfig& cfg, const fpp::Point& target,
                             std::uint64_t trial) {
  return {{"command", command},
          {"distribution", cfg.spec->to_json()},
          {"target", target},
          {"seed", cfg.seed},
          {"trial", trial},
          {"rho", cfg.rho}};
}

template <class Rep>
int run_single(const std::string& command, const Options& o, const fpp::ExperimentConfig& cfg) {
  const fpp::Point target = parse_target(o.target);
  if (static_cast<int>(target.size()) != cfg.dim() && !o.direction.empty())
    throw UsageError("--target dimension does not match --direction");
  const auto config = single_config(command, cfg, target, o.trial);
  const auto box = fpp::experiment_box(target, cfg.rho);
  const auto env = fpp::sample_environment<Rep>(cfg.spec, box, cfg.seed, o.trial);
  const fpp::Point origin(target.size(), 0);

  std::ofstream f;
  auto& os = open_output(o.out, f);
  fpp::report::CsvWriter csv(os, config);
  const auto dir = fpp::directed_time(env, target, true);
  const auto time_field = [&](Rep t) {
    if constexpr (fpp::TimeTraits<Rep>::exact) return fpp::detail::exact_string(env, t);
    else return fpp::report::format_double(env.to_real(t));
  };
  if (command == "geodesic") {
    const auto geo = fpp::geodesic_time(env, origin, target);
    csv.row({"target", "norm", "t", "t_dir", "hops", "reachable", "touched_boundary"});
    csv.row({fpp::format_point(target), std::to_string(fpp::l1_norm(target)), time_field(geo.time),
             time_field(dir.time), std::to_string(geo.min_hops), geo.reachable ? "1" : "0",
             geo.touched_boundary ? "1" : "0"});
    write_path_csv(o.path_csv, geo.geodesic, config);
  } else {
    csv.row({"target", "norm", "t_dir", "hops"});
    csv.row({fpp::format_point(target), std::to_string(fpp::l1_norm(target)), time_field(dir.time),
             std::to_string(dir.geodesic.edge_count())});
    write_path_csv(o.path_csv, dir.geodesic, config);
  }
  return kExitPass;
}

int cmd_single(const std::string& command, const Options& o) {
  const auto cfg = load_config(o);
  return fpp::detail::dispatch_time_rep(*cfg.spec, [&]<class Rep>() { return run_single<Rep>(command, o, cfg); });
}

int cmd_verify(const Options& o) {
  const auto cfg = load_config(o);
  fpp::VerifyConfig v;
  v.spec = cfg.spec;
  v.dim = cfg.dim();
  v.seed = cfg.seed;
  v.shifts = cfg.shifts;
  v.eps = cfg.eps;
  v.rho = cfg.rho;
  v.direction = cfg.direction;
  v.pattern = cfg.pattern;
  v.corrupt_shift = o.corrupt_shift;
  if (o.oracle_envs) v.oracle_envs = *o.oracle_envs;
  if (o.chain_trials) v.chain_trials = *o.chain_trials;
  if (o.chain_scale) v.chain_scale = *o.chain_scale;
  if (o.random_walks) v.random_walks = *o.random_walks;

  const auto rep = fpp::run_verify_suite(v);
  auto j = rep.to_json();
  j["record"] = "verify";
  j["tool"] = fpp::kToolName;
  j["version"] = fpp::kToolVersion;
  j["config_hash"] = fpp::report::config_hash(v.to_json());
  j["config"] = v.to_json();
  if (!o.out.empty()) {
    std::ofstream f;
    open_output(o.out, f) << j.dump(2) << '\n';
  }
  for (const auto& c : rep.checks)
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " cases=" << c.cases
              << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  if (rep.pattern && !rep.pattern->is_infinite())
    std::cout << "max_safe_delta=" << fpp::report::format_double(rep.max_safe_delta) << '\n';
  if (const auto* bad = rep.first_failure()) {
    std::cerr << "verify failed: " << bad->name << ": " << bad->detail << '\n';
    return kExitAssertion;
  }
  return kExitPass;
}

int cmd_experiment(const std::string& command, const Options& o) {
  const auto cfg = load_config(o);
  if (o.out.empty()) throw UsageError(command + ": --out DIR is required");
  const auto progress = [](const std::string& line) { std::cerr << line << '\n'; };
  fpp::ExperimentResult res;
  if (command == "gap") res = fpp::run_gap_experiment(cfg, progress);
  if (command == "tail") res = fpp::run_tail_experiment(cfg, progress);
  if (command == "constants") res = fpp::estimate_time_constants(cfg, progress);
  auto config = cfg.to_json();
  config["command"] = command;
  for (const auto& path : fpp::report::write_experiment(o.out, res, config)) std::cerr << "wrote " << path.string() << '\n';
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  if (!res.assertions.passed()) {
    std::cerr << command << ": hard assertion failed: " << res.assertions.first_failures.front() << '\n';
    return kExitAssertion;
  }
  return kExitPass;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--spec", o.spec_path, "JSON run file with the edge law")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--rho", o.rho, "box margin as a fraction of |target|_1");
  sub->add_option("--direction", o.direction, "direction x, comma separated");
  sub->add_option("--shifts", o.shifts, "shift list, e.g. 1/2,1");
  sub->add_option("--delta", o.delta, "length/gap event parameter");
  sub->add_option("--pattern-length", o.pattern_length, "override the pattern ladder length");
  sub->add_option("--pattern-a", o.pattern_a, "override the pattern's low value");
  sub->add_option("--pattern-b", o.pattern_b, "override the pattern's high value");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-passage percolation experiments", "fpp-lab"};
  app.set_version_flag("--version", std::string(fpp::kToolVersion));
  app.require_subcommand(1);
  Options o;

  for (const char* name : {"geodesic", "directed"}) {
    auto* sub = app.add_subcommand(name, std::string("sample one environment and compute ") +
                                             (std::string(name) == "geodesic" ? "t and directed t" : "directed t"));
    add_common(sub, o);
    sub->add_option("--target", o.target, "target vertex, comma separated")->required();
    sub->add_option("--trial", o.trial, "trial id within the seed");
    sub->add_option("--out", o.out, "CSV output file (default stdout)");
    sub->add_option("--path-csv", o.path_csv, "write the geodesic's vertices here");
  }
  auto* verify = app.add_subcommand("verify", "run the hard-assertion suite");
  add_common(verify, o);
  verify->add_option("--out", o.out, "JSON report file");
  verify->add_option("--oracle-envs", o.oracle_envs, "environments per oracle check");
  verify->add_option("--chain-trials", o.chain_trials, "samples for the inequality chain");
  verify->add_option("--chain-scale", o.chain_scale, "n for the chain samples");
  verify->add_option("--random-walks", o.random_walks, "random walks for the occurrence bound");
  verify->add_flag("--corrupt-shift", o.corrupt_shift, "test fixture: shift only every other edge slot");

  for (const char* name : {"gap", "tail", "constants"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    add_common(sub, o);
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--trials", o.trials, "trials per level");
    sub->add_option("--scales", o.scales, "n list, comma separated");
    sub->add_option("--norms", o.norms, "target norms for the tail experiment");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_option("--argmin-oracle-norm", o.argmin_oracle_norm, "largest norm for the argmin oracle");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "geodesic" || command == "directed") return cmd_single(command, o);
    if (command == "verify") return cmd_verify(o);
    return cmd_experiment(command, o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "fpp-lab " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "fpp-lab " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fpp-lab " << command << ": " << e.what() << '\n';
    return kExitAssertion;
  }
}
