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

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qndsim/analytics.hpp"
#include "qndsim/decoherence.hpp"
#include "qndsim/diagnostics.hpp"
#include "qndsim/species.hpp"

namespace qndsim {
namespace {

constexpr double kPi = std::numbers::pi;
const HalfInt kOne(1);
const HalfInt kTwo(2);

struct Warnings {
  std::vector<std::string> messages;
  ScopedDiagnostics scope{[this](std::string_view m) { messages.emplace_back(m); }};
};

AtomicSpecies toy() { return load_species(std::string(QNDSIM_DATA_DIR) + "/toy_symmetric.species"); }

// Same level structure as the toy species with the two ground levels split
// by `split` Hz.
AtomicSpecies split_toy(double split) {
  AtomicSpecies s = toy();
  s.ground[0].energy_hz = -split / 2;
  s.ground[1].energy_hz = split / 2;
  return s;
}

TEST(Coupling, FarDetunedVanishes) {
  const auto rb = rubidium87_d2();
  const auto cl = coupling_and_lineshape(rb, 1e16);
  EXPECT_LT(std::abs(cl.coupling.at(kOne)), 1e-9);
  EXPECT_LT(std::abs(cl.coupling.at(kTwo)), 1e-9);
  EXPECT_LT(cl.lineshape, 1e-18);
}

TEST(Coupling, OnResonanceIsPurelyAbsorptive) {
  const auto s = split_toy(2e15);
  // Probe on the lines out of the lower ground level; the others are 2e15 Hz away.
  const auto cl = coupling_and_lineshape(s, 1e15);
  const double gamma = s.gamma_hz;
  EXPECT_NEAR(cl.lineshape, 1.0, 1e-15);
  EXPECT_NEAR(cl.coupling.at(s.ground[0].f), 0.0, 1e-300);
  EXPECT_NEAR(cl.coupling.at(s.ground[1].f), gamma / 2e15, 1e-20);
}

TEST(Coupling, DetunedRubidiumAgainstReferenceStrengths) {
  const auto rb = rubidium87_d2();
  const double line_12 = rb.excited[2].energy_hz - rb.ground[0].energy_hz;
  const double probe = line_12 + 3.2e9;
  // Reference relative strengths out of F = 1 to F' = 0, 1, 2.
  const double strengths[] = {1.0 / 6.0, 5.0 / 12.0, 5.0 / 12.0};
  const double gamma = rb.gamma_hz;
  double expected = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = probe - (rb.excited[k].energy_hz - rb.ground[0].energy_hz);
    expected += gamma * d / (d * d + gamma * gamma) * strengths[k];
  }
  const auto cl = coupling_and_lineshape(rb, probe);
  EXPECT_NEAR(cl.coupling.at(kOne), expected, 1e-15);
  EXPECT_NEAR(std::abs(expected), gamma / 3.2e9, 0.1 * gamma / 3.2e9);
  const auto lines = detunings_at(rb, probe);
  EXPECT_EQ(lines.size(), 8u);
}

TEST(Balance, ToySpeciesIsMidway) {
  const auto s = toy();
  const double probe = balance_detunings(s);
  EXPECT_NEAR(probe, 0.0, 1e-12 * 1e9 * 2);
  const auto window = balance_window(s);
  EXPECT_NEAR(window.low_hz, -1e9 + s.gamma_hz, 1e-6);
  EXPECT_NEAR(window.high_hz, 1e9 - s.gamma_hz, 1e-6);
}

TEST(Balance, RubidiumCouplingsCancel) {
  const auto rb = rubidium87_d2();
  const double probe = balance_detunings(rb);
  const auto cl = coupling_and_lineshape(rb, probe);
  const double s1 = cl.coupling.at(kOne);
  const double s2 = cl.coupling.at(kTwo);
  EXPECT_LT(std::abs(s1 + s2), 1e-9 * std::abs(s1));
  EXPECT_LT(s1, 0.0);  // the probe sits below the F = 1 lines
  const auto window = balance_window(rb);
  EXPECT_GT(probe, window.low_hz);
  EXPECT_LT(probe, window.high_hz);
}

TEST(Balance, NoRootCases) {
  // Manifolds overlap when the ground splitting is below the excited spread.
  auto overlap = rubidium87_d2();
  overlap.ground[1].energy_hz = overlap.ground[0].energy_hz + 1e8;
  EXPECT_THROW(balance_window(overlap), NoRoot);
  auto three = toy();
  three.ground.push_back({HalfInt(2), 5e9});
  EXPECT_THROW(balance_detunings(three), NoRoot);
  // A window that stays on one side of the root.
  EXPECT_THROW(balance_detunings(toy(), {-9e8, -5e8}), NoRoot);
}

TEST(Geometry, PhasePerAtomScaling) {
  const auto rb = rubidium87_d2();
  const ProbeGeometry g{2e-10, 1e7, 0.0};
  EXPECT_EQ(phase_per_atom(rb, g, 0.0), 0.0);
  const ProbeGeometry doubled{4e-10, 1e7, 0.0};
  EXPECT_NEAR(phase_per_atom(rb, doubled, 1e-3), 0.5 * phase_per_atom(rb, g, 1e-3), 1e-25);
  EXPECT_THROW(phase_per_atom(rb, ProbeGeometry{0.0, 1e7, 0.0}, 1e-3), std::invalid_argument);
  EXPECT_THROW(resonant_optical_density(rb, ProbeGeometry{1e-10, 1e7, 1.5}), std::invalid_argument);
}

TEST(Geometry, RubidiumExampleOrderOfMagnitude) {
  const auto rb = rubidium87_d2();
  const ProbeGeometry g{2e-10, 1e7, 0.0};
  const auto budget = squeezing_budget(rb, g);
  const double lambda = rb.wavelength_m;
  EXPECT_NEAR(budget.rho0, lambda * lambda * 1e7 / (4 * kPi * 2e-10), 1e-9);
  EXPECT_GT(budget.rho0, 2400.0 / 3);
  EXPECT_LT(budget.rho0, 2400.0 * 3);
  EXPECT_GT(budget.phi, 4.1e-7 / 3);
  EXPECT_LT(budget.phi, 4.1e-7 * 3);
  EXPECT_NEAR(budget.mu, budget.s_coupling * budget.s_coupling / budget.lineshape, 1e-15);
}

TEST(Dephasing, BalancedAndGeneralForms) {
  const auto rb = rubidium87_d2();
  const ProbeGeometry even{2e-10, 1e7, 0.0};
  EXPECT_EQ(optical_dephasing(rb, even, -1e-3, 1e-3).balanced, 0.0);
  EXPECT_NEAR(optical_dephasing(rb, even, -1e-3, 1e-3).general, 0.0, 1e-20);

  const ProbeGeometry one_atom{2e-10, 1e7, 2.0 / 1e7};
  const double s = 1e-3;
  const auto d = optical_dephasing(rb, one_atom, s, -s);
  EXPECT_NEAR(d.balanced / phase_per_atom(rb, one_atom, s), 1.0, 1e-12);
  EXPECT_NEAR(d.general / d.balanced, 1.0, 1e-9);

  const ProbeGeometry tilted{3e-10, 5e6, 0.3};
  const double s1 = 2e-3, s2 = -0.5e-3;
  const double direct = rb.wavelength_m * rb.wavelength_m / (4 * kPi * 3e-10) *
                        (5e6 * 1.3 / 2 * s1 + 5e6 * 0.7 / 2 * s2);
  EXPECT_NEAR(optical_dephasing(rb, tilted, s1, s2).general / direct, 1.0, 1e-14);
}

TEST(Scattering, LinearInPhotons) {
  EXPECT_EQ(scattering_probability(2400, 1e7, 0.2, 0.0, 1e-6), 0.0);
  const double one = scattering_probability(2400, 1e7, 0.2, 1e7, 1.7e-6);
  EXPECT_NEAR(scattering_probability(2400, 1e7, 0.2, 2e7, 1.7e-6), 2 * one, 1e-18);
  EXPECT_NEAR(one, 2400.0 / 1e7 * 0.04 * 1e7 / 2 * 1.7e-6, 1e-18);
  EXPECT_NEAR(photons_for_eta(one, 2400, 1e7, 0.2, 1.7e-6), 1e7, 1e-6);
}

TEST(Scattering, RubidiumBalancedLineshape) {
  const auto rb = rubidium87_d2();
  const auto budget = squeezing_budget(rb, ProbeGeometry{2e-10, 1e7, 0.0});
  const double eta = scattering_probability(budget.rho0, 1e7, 0.2, 1e7, budget.lineshape);
  const double independent = budget.rho0 * 0.04 * budget.lineshape / 2.0;
  EXPECT_NEAR(eta / independent, 1.0, 1e-14);
}

TEST(Scattering, WarningsAndClamp) {
  Warnings w;
  EXPECT_EQ(scattering_probability(2400, 1e7, 0.2, 1e30, 1.0), 1.0);
  EXPECT_EQ(w.messages.size(), 1u);
  scattering_probability(2400, 1e7, 0.5, 1.0, 1e-6);
  EXPECT_EQ(w.messages.size(), 2u);
}

TEST(Scattering, ReproducesSignalToNoise) {
  // mu rho_0 eta with eta from the scattering formula equals M^2 N N_p.
  const auto rb = rubidium87_d2();
  const double n = 1e7;
  const ProbeGeometry g{2e-10, n, 0.0};
  const auto budget = squeezing_budget(rb, g);
  const double c = 0.05;
  const double np = 1e8;
  const double eta = scattering_probability(budget.rho0, n, c, np, budget.lineshape);
  const double kappa_budget = budget.mu * budget.rho0 * eta;
  const double kappa_direct = measurement_strength(budget.phi, c) * n * np;
  EXPECT_NEAR(kappa_budget / kappa_direct, 1.0, 0.01);
}

TEST(SqueezingWithDecay, Examples) {
  EXPECT_EQ(squeezing_with_decay(1.0, 2400, 0.0), 1.0);
  EXPECT_EQ(squeezing_with_decay(1.0, 2400, 1.0), 1.0);
  EXPECT_NEAR(squeezing_with_decay(1.0, 2400, 0.01), 0.9801 / 25.0 + 0.0199, 1e-15);
}

TEST(OptimizeEta, Examples) {
  const auto flat = optimize_eta(1e-9, 1.0);
  EXPECT_NEAR(flat.xi_squared, 1.0, 1e-8);
  const auto best = optimize_eta(1.0, 2400);
  EXPECT_GE(best.xi_squared, 0.05);
  EXPECT_LE(best.xi_squared, 0.065);
  EXPECT_GE(best.eta, 0.005);
  EXPECT_LE(best.eta, 0.03);
  // Stationarity against a fine scan.
  double scan = 1.0;
  for (int i = 1; i < 100000; ++i) scan = std::min(scan, squeezing_with_decay(1.0, 2400, i * 1e-5));
  EXPECT_LE(best.xi_squared, scan + 1e-10);
  double previous = 1.0;
  for (double rho0 : {10.0, 100.0, 1000.0, 1e4, 1e5}) {
    const double xi2 = optimize_eta(1.0, rho0).xi_squared;
    EXPECT_LT(xi2, previous);
    previous = xi2;
  }
}

TEST(Snr, Examples) {
  EXPECT_NEAR(snr({1e12, 100.0, 10.0}), 10.0, 1e-4);
  EXPECT_EQ(snr({1e6, 0.0, 5.0}), 0.0);
  EXPECT_NEAR(snr({50.0, 50.0, 0.0}), 5.0, 1e-14);
  EXPECT_EQ(snr({0.0, 0.0, 0.0}), 0.0);
}

}  // namespace
}  // namespace qndsim
