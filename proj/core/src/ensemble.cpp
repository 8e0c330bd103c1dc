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

#include "qndsim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qndsim/analytics.hpp"
#include "qndsim/rng.hpp"
#include "qndsim/stats.hpp"
#include "qndsim/version.hpp"

namespace qndsim {

void EnsembleConfig::validate() const {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  if (n_trajectories < 1) throw std::invalid_argument("n_trajectories must be >= 1");
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
}

std::uint64_t default_record_stride(std::uint64_t n_photons) {
  if (n_photons >= 100000) return 100;
  return std::max<std::uint64_t>(1, (n_photons + 999) / 1000);
}

std::size_t expected_series_length(const EnsembleConfig& config) {
  return static_cast<std::size_t>((config.n_photons + config.record_stride - 1) /
                                  config.record_stride) +
         1;
}

Trajectory run_trajectory(const EnsembleConfig& config, std::uint64_t index) {
  config.validate();
  Trajectory traj;
  traj.index = index;
  traj.series.reserve(expected_series_length(config));

  CollectiveState state = css_init(config.n_atoms);
  const HeterodyneProbe probe(config.n_atoms, config.params);
  PhaseOffsetEstimator estimator(config.params);
  TrajectoryRng rng(config.seed, index);

  PhaseDistribution next = probe.distribution(state);
  double mean_jz = moments(state).mean_jz;
  {
    const auto m = moments(state);
    traj.series.push_back({0, m.mean_jz, m.var_jz});
  }

  try {
    for (std::uint64_t step = 1; step <= config.n_photons; ++step) {
      const DetectionEvent event = next.sample(rng.uniform());
      estimator.add(event.phase, mean_jz);
      const auto result = probe.detect(state, event);
      next = result.next;
      mean_jz = result.mean_jz;
      traj.completed_photons = step;
      if (step % config.record_stride == 0 || step == config.n_photons) {
        const auto m = moments(state);
        traj.series.push_back({step, m.mean_jz, m.var_jz});
      }
    }
  } catch (const DegenerateKernel& e) {
    traj.failed = true;
    traj.failure = e.what();
  }

  traj.phase_mean = estimator.phase_mean();
  traj.delta_phi_bar = estimator.delta_phi_bar();
  traj.jz_proxy = estimator.jz_proxy();
  if (config.keep_final_amplitudes && !traj.failed) {
    traj.final_amplitudes.assign(state.amplitudes().begin(), state.amplitudes().end());
  }
  return traj;
}

unsigned default_worker_count() {
  if (const char* env = std::getenv("QNDSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunResult run_ensemble(const EnsembleConfig& config, const EnsembleOptions& options) {
  config.validate();
  const std::uint64_t count = config.n_trajectories;
  std::vector<Trajectory> trajectories(count);

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(
      options.workers == 0 ? default_worker_count() : options.workers, count));
  std::atomic<std::uint64_t> next_index{0};
  std::atomic<std::uint64_t> finished{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::mutex progress_mutex;

  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next_index.fetch_add(1);
      if (i >= count) return;
      try {
        trajectories[i] = run_trajectory(config, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next_index.store(count);
        return;
      }
      const std::uint64_t done = finished.fetch_add(1) + 1;
      if (options.on_progress) {
        std::lock_guard lock(progress_mutex);
        options.on_progress(done);
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);

  RunResult result;
  result.config = config;
  result.code_version = kVersionString;
  result.final_mean_jz.resize(count, std::numeric_limits<double>::quiet_NaN());
  result.final_var_jz.resize(count, std::numeric_limits<double>::quiet_NaN());

  const CollectiveState initial = css_init(config.n_atoms);
  const auto born = initial.probabilities();
  result.histogram.resize(born.size());
  for (std::size_t k = 0; k < born.size(); ++k) {
    result.histogram[k] = {initial.eigenvalue(k), 0, born[k]};
  }

  std::vector<std::uint64_t> ok;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Trajectory& t = trajectories[i];
    if (t.failed) {
      ++result.failed_count;
      result.failed_indices.push_back(i);
      continue;
    }
    ok.push_back(i);
    const MomentSample& last = t.series.back();
    result.final_mean_jz[i] = last.mean_jz;
    result.final_var_jz[i] = last.var_jz;
    const double k = std::round(last.mean_jz + 0.5 * config.n_atoms);
    const auto bin = static_cast<std::size_t>(std::clamp(k, 0.0, double(config.n_atoms)));
    ++result.histogram[bin].count;
  }

  const std::size_t length = expected_series_length(config);
  if (!ok.empty()) {
    const Trajectory& first = trajectories[ok.front()];
    for (std::size_t r = 0; r < length; ++r) result.steps.push_back(first.series[r].step);
    std::vector<double> column(ok.size());
    for (std::size_t r = 0; r < length; ++r) {
      for (std::size_t j = 0; j < ok.size(); ++j) column[j] = trajectories[ok[j]].series[r].var_jz;
      result.mean_var_jz.push_back(stats::pairwise_sum(column) / static_cast<double>(ok.size()));
      for (std::size_t j = 0; j < ok.size(); ++j) {
        column[j] = trajectories[ok[j]].series[r].mean_jz;
      }
      result.mean_mean_jz.push_back(stats::pairwise_sum(column) / static_cast<double>(ok.size()));
    }
  }

  if (options.keep_trajectories) result.trajectories = std::move(trajectories);
  return result;
}

}  // namespace qndsim
