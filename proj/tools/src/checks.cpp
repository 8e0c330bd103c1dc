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

#include "qndsim_cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "qndsim/analytics.hpp"
#include "qndsim/ensemble.hpp"
#include "qndsim/measurement.hpp"
#include "qndsim/rng.hpp"
#include "qndsim/stats.hpp"

namespace qndsim::cli {
namespace {

// Reflection giving contrast C, the branch with R <= 1/2.
double reflection_for_contrast(double c) { return 0.5 * (1.0 - std::sqrt(1.0 - c * c)); }

double max_relative_magnitude_error(const CollectiveState& a, const CollectiveState& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.dimension(); ++k) {
    const double x = std::abs(a.amplitudes()[k]);
    const double y = std::abs(b.amplitudes()[k]);
    if (x == 0.0 && y == 0.0) continue;
    worst = std::max(worst, std::abs(x - y) / std::max(x, y));
  }
  return worst;
}

std::vector<double> posterior(const std::vector<Amplitude>& amplitudes) {
  std::vector<double> p(amplitudes.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(amplitudes[k]);
  return p;
}

std::vector<double> gaussian_prediction(int n_atoms, double n_photons,
                                        const InterferometerParams& params, double dphi) {
  const auto w = gaussian_backaction_weights(n_atoms, n_photons, params, dphi);
  return reweight(css_init(n_atoms), w).probabilities();
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"product_form", "gaussian_kl",
                                                 "subprocess_reduction", "born_rule"};
  return names;
}

CheckResult run_check(const std::string& name, const CheckOptions& options) {
  if (name == "product_form") return check_product_form(options);
  if (name == "gaussian_kl") return check_gaussian_kl(options);
  if (name == "subprocess_reduction") return check_subprocess_reduction(options);
  if (name == "born_rule") return check_born_rule(options);
  throw std::invalid_argument("unknown check '" + name + "'");
}

CheckResult check_product_form(const CheckOptions& options) {
  constexpr int kAtoms = 200;
  double worst = 0.0;
  for (int seq = 0; seq < options.product_sequences; ++seq) {
    // Alternate balanced and unbalanced splits so the imaginary kernel part
    // is exercised too.
    const InterferometerParams params(seq % 2 == 0 ? 0.5 : 0.2, 0.02);
    const HeterodyneProbe probe(kAtoms, params);
    TrajectoryRng rng(options.seed, static_cast<std::uint64_t>(seq));
    CollectiveState sequential = css_init(kAtoms);
    std::vector<double> phases;
    for (int k = 0; k < options.product_length; ++k) {
      const auto event = probe.distribution(sequential).sample(rng.uniform());
      phases.push_back(event.phase);
      probe.detect(sequential, event);
    }
    const CollectiveState product =
        reweight(css_init(kAtoms), backaction_weights(params, phases, kAtoms));
    worst = std::max(worst, max_relative_magnitude_error(sequential, product));
  }
  return {"product_form", worst <= options.product_tolerance, worst, options.product_tolerance,
          fmt::format("{} sequences x {} photons, N_at={}", options.product_sequences,
                      options.product_length, kAtoms)};
}

CheckResult check_gaussian_kl(const CheckOptions& options) {
  EnsembleConfig config;
  config.n_atoms = 200;
  config.n_photons = 10000;
  config.params = InterferometerParams(0.5, 1e-3);
  config.seed = options.seed;
  config.record_stride = config.n_photons;
  config.keep_final_amplitudes = true;
  const Trajectory traj = run_trajectory(config, 0);
  if (traj.failed) return {"gaussian_kl", false, INFINITY, options.kl_tolerance, traj.failure};

  const auto p = posterior(traj.final_amplitudes);
  const double np = static_cast<double>(config.n_photons);
  const auto kl_for = [&](double dphi) {
    return stats::kl_divergence(p, gaussian_prediction(config.n_atoms, np, config.params, dphi));
  };
  const double kl = kl_for(traj.delta_phi_bar);
  return {"gaussian_kl", kl < options.kl_tolerance, kl, options.kl_tolerance,
          fmt::format("score-weighted dphi={:.6g}; raw phase mean gives KL={:.4g}, "
                      "-phi<Jz> proxy gives KL={:.4g}",
                      traj.delta_phi_bar, kl_for(traj.phase_mean), kl_for(traj.jz_proxy))};
}

CheckResult check_subprocess_reduction(const CheckOptions& options) {
  double worst = 0.0;
  std::string detail;
  for (const double c : {0.2, 0.5, 0.9}) {
    const InterferometerParams params(reflection_for_contrast(c), 1e-3);
    const double exact = measurement_strength(params);
    const double integrated = integrated_subprocess_strength(params, options.reduction_resolution);
    const double rel = std::abs(integrated - exact) / exact;
    worst = std::max(worst, rel);
    detail += fmt::format("{}C={}: {:.3e}", detail.empty() ? "" : ", ", c, rel);
  }
  return {"subprocess_reduction", worst <= options.reduction_tolerance, worst,
          options.reduction_tolerance, detail};
}

CheckResult check_born_rule(const CheckOptions& options) {
  EnsembleConfig config;
  config.n_atoms = 20;
  config.params = InterferometerParams(0.5, 0.05);
  const double m2 = measurement_strength(config.params);
  config.n_photons = static_cast<std::uint64_t>(std::ceil(10.0 / m2));
  config.n_trajectories = static_cast<std::uint64_t>(options.born_trajectories);
  config.seed = options.seed;
  config.record_stride = config.n_photons;
  EnsembleOptions run_options;
  run_options.workers = options.workers;
  run_options.keep_trajectories = false;
  const RunResult result = run_ensemble(config, run_options);

  std::vector<double> counts;
  std::vector<double> probs;
  for (const auto& bin : result.histogram) {
    counts.push_back(static_cast<double>(bin.count));
    probs.push_back(bin.born_probability);
  }
  const auto fit = stats::chi_square_test(counts, probs);
  const bool passed = fit.p_value > options.alpha && result.failed_count == 0;
  return {"born_rule", passed, fit.p_value, options.alpha,
          fmt::format("chi2={:.4g} dof={} over {} trajectories of {} photons, {} failed",
                      fit.statistic, fit.degrees_of_freedom, config.n_trajectories,
                      config.n_photons, result.failed_count)};
}

}  // namespace qndsim::cli
