// Copyright 2026 The qndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qndsim_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qndsim/analytics.hpp"
#include "qndsim/decoherence.hpp"
#include "qndsim/diagnostics.hpp"
#include "qndsim/ensemble.hpp"
#include "qndsim/species.hpp"
#include "qndsim/version.hpp"
#include "qndsim_cli/checks.hpp"
#include "qndsim_cli/config_file.hpp"

namespace qndsim::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr const char* kManifestName = "manifest.json";

/// Usage errors detected after parsing; reported with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

std::uint64_t as_count(double value, const char* flag) {
  if (!(value >= 0.0) || value != std::floor(value) || value > 9.007199254740992e15) {
    throw ConfigError(fmt::format("{} must be a non-negative integer (got {})", flag, value));
  }
  return static_cast<std::uint64_t>(value);
}

/// Writes a CSV file whose first line points at the run manifest.
class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) : path_(path) {
    fmt::format_to(std::back_inserter(buffer_), "# manifest: {}\n{}\n", kManifestName, header);
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((fmt::format_to(std::back_inserter(buffer_), "{}{}", first ? "" : ",", fields),
      first = false),
     ...);
    buffer_.push_back('\n');
    if (buffer_.size() > (1u << 20)) flush();
  }

  void close() {
    flush();
    out_.close();
    if (!out_) throw std::runtime_error("failed writing " + path_.string());
  }

 private:
  void flush() {
    if (!out_.is_open()) {
      out_.open(path_, std::ios::binary | std::ios::trunc);
      if (!out_) throw std::runtime_error("cannot create " + path_.string());
    }
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }

  fs::path path_;
  std::ofstream out_;
  fmt::memory_buffer buffer_;
};

void write_manifest(const fs::path& dir, json manifest) {
  std::ofstream out(dir / kManifestName, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot create " + (dir / kManifestName).string());
  out << manifest.dump(2) << '\n';
}

json manifest_base(const std::string& subcommand, const std::string& config_path,
                   const fs::path& out_dir) {
  json m;
  m["tool"] = "qndsim";
  m["version"] = kVersionString;
  m["subcommand"] = subcommand;
  m["timestamp"] = utc_timestamp();
  m["inputs"] = json::array();
  if (!config_path.empty()) m["inputs"].push_back(fs::absolute(config_path).string());
  m["output_dir"] = fs::absolute(out_dir).lexically_normal().string();
  return m;
}

/// Counts validity warnings while a table is rendered, so a sweep that leaves
/// a regime produces one summary line instead of one line per row.
class WarningTally {
 public:
  WarningTally()
      : scope_([this](std::string_view message) {
          if (count_++ == 0) first_ = message;
        }) {}

  void report(std::ostream& err, const std::string& what) const {
    if (count_ == 0) return;
    err << "qndsim warning: " << count_ << " " << what << " outside the validity regime; first: "
        << first_ << '\n';
  }

 private:
  std::size_t count_ = 0;
  std::string first_;
  ScopedDiagnostics scope_;
};

// ---------------------------------------------------------------------------

struct InterferometerArgs {
  double phi = 1e-3;
  double reflection = 0.5;
  std::optional<double> transmission;

  void add_to(CLI::App& app) {
    app.add_option("--phi", phi, "Per-atom phase shift phi (rad)")->capture_default_str();
    app.add_option("--R", reflection, "Beamsplitter reflection probability")->capture_default_str();
    app.add_option("--T", transmission, "Transmission probability (must equal 1 - R if given)");
  }

  InterferometerParams params() const {
    try {
      if (transmission) return InterferometerParams::from_split(*transmission, reflection, phi);
      return InterferometerParams(reflection, phi);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  json to_json() const {
    const auto p = params();
    return {{"phi", p.phi()}, {"R", p.reflection()}, {"T", p.transmission()},
            {"contrast", p.contrast()}};
  }
};

// ---------------------------------------------------------------------------

struct SimulateArgs {
  int atoms = 200;
  InterferometerArgs interferometer;
  double photons = 1e4;
  double trajectories = 100;
  std::uint64_t seed = 42;
  double stride = 0;
  unsigned threads = 0;
  std::optional<double> save_trajectories;
  std::string out = ".";
  bool progress = false;
};

int cmd_simulate(const SimulateArgs& a, const std::string& config_path, std::ostream& out,
                 std::ostream& err) {
  EnsembleConfig config;
  config.n_atoms = a.atoms;
  config.params = a.interferometer.params();
  config.n_photons = as_count(a.photons, "--photons");
  config.n_trajectories = as_count(a.trajectories, "--trajectories");
  config.seed = a.seed;
  config.record_stride =
      a.stride > 0 ? as_count(a.stride, "--stride") : default_record_stride(config.n_photons);
  const std::uint64_t saved =
      a.save_trajectories ? as_count(*a.save_trajectories, "--save-trajectories")
                          : config.n_trajectories;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  EnsembleOptions options;
  options.workers = a.threads;
  options.keep_trajectories = saved > 0;
  if (a.progress) {
    const std::uint64_t every = std::max<std::uint64_t>(1, config.n_trajectories / 20);
    options.on_progress = [&err, every, total = config.n_trajectories](std::uint64_t done) {
      if (done % every == 0 || done == total) err << "simulate: " << done << "/" << total << '\n';
    };
  }

  RunResult result;
  try {
    result = run_ensemble(config, options);
  } catch (const std::exception& e) {
    err << "simulate: simulation failed: " << e.what() << '\n';
    return kSimulationFailed;
  }
  if (result.failed_count == config.n_trajectories) {
    err << "simulate: every trajectory failed; first failure: "
        << (result.trajectories.empty() ? std::string("(not kept)")
                                        : result.trajectories.front().failure)
        << '\n';
    return kSimulationFailed;
  }
  if (result.failed_count > 0) {
    err << "qndsim warning: " << result.failed_count
        << " trajectories failed and are excluded from averages\n";
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);

  CsvFile traj(dir / "trajectories.csv", "trajectory_id,step,mean_jz,var_jz");
  for (std::uint64_t i = 0; i < std::min<std::uint64_t>(saved, result.trajectories.size()); ++i) {
    for (const auto& s : result.trajectories[i].series) {
      traj.row(i, s.step, num(s.mean_jz), num(s.var_jz));
    }
  }
  traj.close();

  const double m2 = measurement_strength(config.params);
  CsvFile ens(dir / "ensemble.csv", "step,mean_var_jz,analytic_var_jz,lower_bound,upper_bound");
  {
    WarningTally tally;
    for (std::size_t r = 0; r < result.steps.size(); ++r) {
      const double np = static_cast<double>(result.steps[r]);
      const auto theory = short_time_moments(config.n_atoms, np, config.params, 0.0);
      const auto bounds = long_time_bounds(m2, np);
      ens.row(result.steps[r], num(result.mean_var_jz[r]), num(theory.var_jz), num(bounds.lower),
              num(bounds.upper));
    }
    tally.report(err, "ensemble.csv rows are");
  }
  ens.close();

  CsvFile hist(dir / "histogram.csv", "n_bin,count,born_probability");
  for (const auto& bin : result.histogram) hist.row(num(bin.n), bin.count, num(bin.born_probability));
  hist.close();

  json manifest = manifest_base("simulate", config_path, dir);
  manifest["seed"] = config.seed;
  json cfg = {{"atoms", config.n_atoms},
              {"photons", config.n_photons},
              {"trajectories", config.n_trajectories},
              {"stride", config.record_stride},
              {"save_trajectories", std::min(saved, config.n_trajectories)}};
  cfg.update(a.interferometer.to_json());
  manifest["config"] = cfg;
  manifest["measurement_strength"] = m2;
  manifest["workers"] = options.workers == 0 ? default_worker_count() : options.workers;
  manifest["failed_trajectories"] = result.failed_indices;
  manifest["outputs"] = {"trajectories.csv", "ensemble.csv", "histogram.csv"};
  write_manifest(dir, manifest);

  out << "simulate: " << config.n_trajectories << " trajectories x " << config.n_photons
      << " photons written to " << dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct AnalyticArgs {
  int atoms = 200;
  InterferometerArgs interferometer;
  double delta_phi_bar = 0.0;
  double np_min = 1e2;
  double np_max = 1e8;
  int points = 61;
  std::string grid = "log";
  std::string out = ".";
};

int cmd_analytic(const AnalyticArgs& a, const std::string& config_path, std::ostream& out,
                 std::ostream& err) {
  if (a.atoms < 1) throw ConfigError("--atoms must be >= 1");
  const InterferometerParams params = a.interferometer.params();
  if (a.points < 0) throw ConfigError("--points must be >= 0");
  if (!(a.np_min >= 0.0) || !(a.np_max >= a.np_min)) {
    throw ConfigError("photon grid requires 0 <= --np-min <= --np-max");
  }
  if (a.grid == "log" && a.points > 0 && !(a.np_min > 0.0)) {
    throw ConfigError("a logarithmic grid requires --np-min > 0");
  }

  std::vector<double> grid;
  for (int i = 0; i < a.points; ++i) {
    const double t = a.points == 1 ? 0.0 : static_cast<double>(i) / (a.points - 1);
    grid.push_back(a.grid == "log" ? a.np_min * std::pow(a.np_max / a.np_min, t)
                                   : a.np_min + t * (a.np_max - a.np_min));
  }
  // Land exactly on the requested end point.
  if (a.points > 1) grid.back() = a.np_max;

  const fs::path dir(a.out);
  fs::create_directories(dir);
  CsvFile csv(dir / "analytic.csv", "N_p,xi2,kappa2,var_short,lower_bound");
  {
    WarningTally tally;
    for (const double np : grid) {
      const auto theory = weak_coupling_theory(a.atoms, np, params, a.delta_phi_bar);
      const auto moments = short_time_moments(a.atoms, np, params, a.delta_phi_bar);
      const auto bounds = long_time_bounds(theory.m_squared, np);
      csv.row(num(np), num(theory.xi_squared), num(theory.kappa_squared), num(moments.var_jz),
              num(bounds.lower));
    }
    tally.report(err, "analytic.csv rows are");
  }
  csv.close();

  json manifest = manifest_base("analytic", config_path, dir);
  manifest["seed"] = nullptr;
  json cfg = {{"atoms", a.atoms},   {"delta_phi_bar", a.delta_phi_bar}, {"np_min", a.np_min},
              {"np_max", a.np_max}, {"points", a.points},               {"grid", a.grid}};
  cfg.update(a.interferometer.to_json());
  manifest["config"] = cfg;
  manifest["outputs"] = {"analytic.csv"};
  write_manifest(dir, manifest);
  out << "analytic: " << grid.size() << " rows written to " << (dir / "analytic.csv").string()
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct BudgetArgs {
  std::string species;
  double area = 2.0e-10;
  double atoms = 1e7;
  double imbalance = 0.0;
  double depth = 0.01;
  std::optional<std::string> out;
};

int cmd_budget(const BudgetArgs& a, const std::string& config_path, std::ostream& out,
               std::ostream& err) {
  AtomicSpecies species;
  try {
    species = a.species.empty() ? rubidium87_d2() : load_species(a.species);
  } catch (const std::exception& e) {
    err << "budget: " << e.what() << '\n';
    return kConfigError;
  }
  if (!(a.depth >= 0.0)) throw ConfigError("--depth must be >= 0");
  const ProbeGeometry geometry{a.area, a.atoms, a.imbalance};
  try {
    geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  SqueezingBudget budget;
  try {
    budget = squeezing_budget(species, geometry);
  } catch (const NoRoot& e) {
    err << "budget: no balanced probe frequency: " << e.what() << '\n';
    return kNoRoot;
  }
  const BeamSplit split = modulator_split(std::sqrt(a.depth));
  const double contrast = InterferometerParams(split.reflection, budget.phi).contrast();
  const double photons = contrast > 0.0 ? photons_for_eta(budget.eta, budget.rho0, a.atoms, contrast,
                                                          budget.lineshape)
                                        : INFINITY;
  const auto dephasing = optical_dephasing(species, geometry, budget.s1, budget.s2);

  const std::vector<std::pair<std::string, double>> rows = {
      {"probe_offset_hz", budget.probe_frequency_hz},
      {"s1", budget.s1},
      {"s2", budget.s2},
      {"s_coupling", budget.s_coupling},
      {"lineshape", budget.lineshape},
      {"mu", budget.mu},
      {"rho0", budget.rho0},
      {"phi_rad", budget.phi},
      {"optical_dephasing_rad", dephasing.general},
      {"eta_opt", budget.eta},
      {"xi2_opt", budget.xi_squared},
      {"xi2_opt_db", 10.0 * std::log10(budget.xi_squared)},
      {"contrast", contrast},
      {"photons_at_eta_opt", photons},
  };
  out << "species = " << species.name << '\n';
  for (const auto& [key, value] : rows) out << key << " = " << num(value) << '\n';

  if (a.out) {
    const fs::path dir(*a.out);
    fs::create_directories(dir);
    CsvFile csv(dir / "budget.csv", "quantity,value");
    for (const auto& [key, value] : rows) csv.row(key, num(value));
    csv.close();
    json manifest = manifest_base("budget", config_path, dir);
    if (!a.species.empty()) manifest["inputs"].push_back(fs::absolute(a.species).string());
    manifest["seed"] = nullptr;
    manifest["config"] = {{"species", a.species.empty() ? "builtin:" + species.name : a.species},
                          {"area", a.area},
                          {"atoms", a.atoms},
                          {"imbalance", a.imbalance},
                          {"depth", a.depth}};
    manifest["outputs"] = {"budget.csv"};
    write_manifest(dir, manifest);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  bool list = false;
  std::vector<std::string> checks;
  CheckOptions options;
  std::string format = "text";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.list) {
    for (const auto& name : check_names()) out << name << '\n';
    return kOk;
  }
  std::vector<std::string> selected = a.checks.empty() ? check_names() : a.checks;
  for (const auto& name : selected) {
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw ConfigError("unknown check '" + name + "' (see --list)");
    }
  }

  bool all = true;
  json report = json::array();
  for (const auto& name : selected) {
    const CheckResult r = run_check(name, a.options);
    all = all && r.passed;
    if (a.format == "json") {
      report.push_back({{"name", r.name},
                        {"passed", r.passed},
                        {"value", r.value},
                        {"threshold", r.threshold},
                        {"detail", r.detail}});
    } else {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << " value=" << num(r.value)
          << " threshold=" << num(r.threshold) << " (" << r.detail << ")\n";
    }
  }
  if (a.format == "json") {
    out << json{{"passed", all}, {"checks", report}}.dump(2) << '\n';
  }
  return all ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-trajectory simulator for heterodyne QND measurement of a collective spin",
               "qndsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersionString);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run an ensemble of measurement trajectories");
  simulate->add_option("--atoms", sim.atoms, "Atom number N_at")->capture_default_str();
  sim.interferometer.add_to(*simulate);
  simulate->add_option("--photons", sim.photons, "Photons per trajectory")->capture_default_str();
  simulate->add_option("--trajectories", sim.trajectories, "Number of trajectories")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--stride", sim.stride, "Record every this many photons (0: automatic)")
      ->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0: QNDSIM_THREADS or all cores)")
      ->capture_default_str();
  simulate->add_option("--save-trajectories", sim.save_trajectories,
                       "Write only the first K trajectories to trajectories.csv");
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  simulate->add_flag("--progress", sim.progress, "Report progress on stderr");

  AnalyticArgs ana;
  auto* analytic = app.add_subcommand("analytic", "Tabulate the weak-coupling theory");
  analytic->add_option("--atoms", ana.atoms, "Atom number N_at")->capture_default_str();
  ana.interferometer.add_to(*analytic);
  analytic->add_option("--delta-phi-bar", ana.delta_phi_bar, "Trajectory phase offset (rad)")
      ->capture_default_str();
  analytic->add_option("--np-min", ana.np_min, "Smallest photon number")->capture_default_str();
  analytic->add_option("--np-max", ana.np_max, "Largest photon number")->capture_default_str();
  analytic->add_option("--points", ana.points, "Grid points (0: header only)")
      ->capture_default_str();
  analytic->add_option("--grid", ana.grid, "Grid spacing")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  analytic->add_option("--out", ana.out, "Output directory")->capture_default_str();

  BudgetArgs bud;
  auto* budget = app.add_subcommand("budget", "Spontaneous-emission squeezing budget");
  budget->add_option("--species", bud.species, "Species data file (default: built-in Rb-87 D2)");
  budget->add_option("--area", bud.area, "Probe beam area (m^2)")->capture_default_str();
  budget->add_option("--atoms", bud.atoms, "Atom number")->capture_default_str();
  budget->add_option("--imbalance", bud.imbalance, "Population imbalance epsilon")
      ->capture_default_str();
  budget->add_option("--depth", bud.depth, "Modulation depth |beta|^2")->capture_default_str();
  budget->add_option("--out", bud.out, "Also write budget.csv and a manifest here");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run the cross-module consistency checks");
  verify->add_flag("--list", ver.list, "List the checks and exit");
  verify->add_option("--check", ver.checks, "Run only this check (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  verify->add_option("--seed", ver.options.seed, "Seed")->capture_default_str();
  verify->add_option("--tol-product", ver.options.product_tolerance,
                     "Product-form relative tolerance")
      ->capture_default_str();
  verify->add_option("--tol-kl", ver.options.kl_tolerance, "Gaussian-limit KL bound")
      ->capture_default_str();
  verify->add_option("--tol-reduction", ver.options.reduction_tolerance,
                     "Sub-process reduction relative tolerance")
      ->capture_default_str();
  verify->add_option("--alpha", ver.options.alpha, "Born-rule significance level")
      ->capture_default_str();
  verify->add_option("--trajectories", ver.options.born_trajectories,
                     "Trajectories in the Born-rule check")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--threads", ver.options.workers, "Worker threads")->capture_default_str();
  verify->add_option("--format", ver.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  std::string config_path;
  try {
    std::vector<std::string> args = raw_args;
    if (!args.empty()) {
      const auto expanded = expand_config({args.begin() + 1, args.end()});
      config_path = expanded.config_path;
      args.resize(1);
      args.insert(args.end(), expanded.args.begin(), expanded.args.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  } catch (const std::exception& e) {
    err << "qndsim: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(sim, config_path, out, err);
    if (*analytic) return cmd_analytic(ana, config_path, out, err);
    if (*budget) return cmd_budget(bud, config_path, out, err);
    if (*verify) return cmd_verify(ver, out);
  } catch (const ConfigError& e) {
    err << "qndsim: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "qndsim: " << e.what() << '\n';
    return kSimulationFailed;
  }
  return kConfigError;
}

}  // namespace qndsim::cli
