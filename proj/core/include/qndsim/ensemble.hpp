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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qndsim/measurement.hpp"
#include "qndsim/spin_state.hpp"

namespace qndsim {

struct EnsembleConfig {
  int n_atoms = 200;
  std::uint64_t n_photons = 0;
  std::uint64_t n_trajectories = 1;
  InterferometerParams params{0.5, 1e-3};
  std::uint64_t seed = 42;
  std::uint64_t record_stride = 1;
  bool keep_final_amplitudes = false;

  /// Throws std::invalid_argument on n_atoms < 1, n_trajectories < 1 or
  /// record_stride < 1.
  void validate() const;
};

/// 100 for runs of at least 1e5 photons; otherwise about 1000 samples per
/// trajectory.
std::uint64_t default_record_stride(std::uint64_t n_photons);

struct MomentSample {
  std::uint64_t step = 0;
  double mean_jz = 0.0;
  double var_jz = 0.0;
};

struct Trajectory {
  std::uint64_t index = 0;
  /// Steps 0, s, 2s, ... and always the last completed step.
  std::vector<MomentSample> series;
  double phase_mean = 0.0;
  double delta_phi_bar = 0.0;
  double jz_proxy = 0.0;
  std::vector<Amplitude> final_amplitudes;
  std::uint64_t completed_photons = 0;
  bool failed = false;
  std::string failure;
};

/// ceil(n_photons / stride) + 1.
std::size_t expected_series_length(const EnsembleConfig& config);

/// Deterministic in (config.seed, index). A DegenerateKernel aborts the
/// trajectory and is reported through Trajectory::failed.
Trajectory run_trajectory(const EnsembleConfig& config, std::uint64_t index);

struct HistogramBin {
  double n = 0.0;
  std::uint64_t count = 0;
  double born_probability = 0.0;
};

struct RunResult {
  EnsembleConfig config;
  std::string code_version;
  /// Final <J_z> per trajectory; NaN for failed ones.
  std::vector<double> final_mean_jz;
  std::vector<double> final_var_jz;
  /// Ensemble averages over successful trajectories at each recorded step.
  std::vector<std::uint64_t> steps;
  std::vector<double> mean_var_jz;
  std::vector<double> mean_mean_jz;
  /// One bin per Dicke level: final <J_z> rounded to the nearest level.
  /// Counts plus failed_count add up to n_trajectories.
  std::vector<HistogramBin> histogram;
  std::uint64_t failed_count = 0;
  std::vector<std::uint64_t> failed_indices;
  std::vector<Trajectory> trajectories;
};

struct EnsembleOptions {
  /// 0 selects default_worker_count().
  unsigned workers = 0;
  bool keep_trajectories = true;
  /// Called after each finished trajectory with the number finished so far.
  std::function<void(std::uint64_t)> on_progress;
};

/// QNDSIM_THREADS when set to a positive integer, else the hardware
/// concurrency.
unsigned default_worker_count();

/// Runs all trajectories on a worker pool. Reduction is indexed by trajectory
/// and order-independent, so the result is bit-identical for any worker count.
RunResult run_ensemble(const EnsembleConfig& config, const EnsembleOptions& options = {});

}  // namespace qndsim
