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

#include <benchmark/benchmark.h>

#include "qndsim/ensemble.hpp"
#include "qndsim/measurement.hpp"
#include "qndsim/rng.hpp"
#include "qndsim/wigner.hpp"

namespace {

using namespace qndsim;

void BM_DetectStep(benchmark::State& st) {
  const int n_atoms = static_cast<int>(st.range(0));
  const InterferometerParams params(0.5, 1e-3);
  const HeterodyneProbe probe(n_atoms, params);
  CollectiveState state = css_init(n_atoms);
  PhaseDistribution next = probe.distribution(state);
  TrajectoryRng rng(7, 0);
  for (auto _ : st) {
    const auto step = probe.detect(state, next.sample(rng.uniform()));
    next = step.next;
    benchmark::DoNotOptimize(next);
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_DetectStep)->Arg(20)->Arg(200)->Arg(2000);

// Kernel application alone, alternating two phases so the state stays wide.
void BM_KernelOnly(benchmark::State& st) {
  const int n_atoms = static_cast<int>(st.range(0));
  const HeterodyneProbe probe(n_atoms, InterferometerParams(0.5, 1e-3));
  CollectiveState state = css_init(n_atoms);
  double phase = 0.3;
  for (auto _ : st) {
    benchmark::DoNotOptimize(probe.detect(state, {phase}));
    phase = -phase;
  }
}
BENCHMARK(BM_KernelOnly)->Arg(200)->Arg(2000);

void BM_SamplePhase(benchmark::State& st) {
  const PhaseDistribution dist(1.0, 0.7, 0.1);
  TrajectoryRng rng(7, 0);
  for (auto _ : st) benchmark::DoNotOptimize(dist.sample(rng.uniform()));
}
BENCHMARK(BM_SamplePhase);

void BM_Wigner6j(benchmark::State& st) {
  const auto h = HalfInt::from_twice;
  for (auto _ : st) {
    benchmark::DoNotOptimize(wigner_6j(h(1), h(3), h(2), h(4), h(3), h(3)));
  }
}
BENCHMARK(BM_Wigner6j);

void BM_Trajectory(benchmark::State& st) {
  EnsembleConfig config;
  config.n_photons = 10000;
  config.record_stride = 100;
  std::uint64_t index = 0;
  for (auto _ : st) benchmark::DoNotOptimize(run_trajectory(config, index++));
  st.SetItemsProcessed(st.iterations() * config.n_photons);
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
