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

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qndsim/species.hpp"
#include "qndsim/wigner.hpp"

namespace qndsim {

/// Relative strengths S_FF' = (2F'+1)(2J+1) {J J' 1; F' F I}^2 of the lines
/// leaving ground level F, keyed by F' over the species' excited levels.
/// They sum to 1 over a complete excited manifold.
std::map<HalfInt, double> line_strengths(const AtomicSpecies& species, HalfInt f);

struct LineDetuning {
  HalfInt f;
  HalfInt f_prime;
  double detuning_hz = 0.0;  // probe frequency minus line frequency
};
using Detunings = std::vector<LineDetuning>;

/// Delta_FF' = probe - (E_F' - E_F) for every ground/excited pair.
Detunings detunings_at(const AtomicSpecies& species, double probe_frequency_hz);

struct CouplingAndLineshape {
  /// Dispersive coupling S_F = sum_F' gamma Delta / (Delta^2 + gamma^2) S_FF'.
  std::map<HalfInt, double> coupling;
  /// Absorptive lineshape L = sum_{F,F'} gamma^2 / (Delta^2 + gamma^2) S_FF'.
  double lineshape = 0.0;
};

CouplingAndLineshape coupling_and_lineshape(const AtomicSpecies& species,
                                            const Detunings& detunings);
CouplingAndLineshape coupling_and_lineshape(const AtomicSpecies& species,
                                            double probe_frequency_hz);

class NoRoot : public std::runtime_error {
 public:
  explicit NoRoot(const std::string& what) : std::runtime_error(what) {}
};

struct FrequencyWindow {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

/// The gap between the two ground levels' line manifolds, pulled in by one
/// linewidth on each side. Throws NoRoot when the species does not have
/// exactly two ground levels or the manifolds overlap.
FrequencyWindow balance_window(const AtomicSpecies& species);

/// Probe frequency where S_1 + S_2 = 0 (S_1 = -S_2), by bracketed bisection
/// to a relative frequency tolerance of 1e-12. Throws NoRoot when S_1 + S_2
/// has the same sign at both ends of `window`.
double balance_detunings(const AtomicSpecies& species, FrequencyWindow window);
double balance_detunings(const AtomicSpecies& species);

struct ProbeGeometry {
  double beam_area_m2 = 0.0;
  double n_atoms = 0.0;
  /// Population imbalance: N_1 = N (1 + e) / 2, N_2 = N (1 - e) / 2.
  double imbalance = 0.0;

  /// Throws std::invalid_argument unless area > 0, N > 0, |imbalance| <= 1.
  void validate() const;
};

/// rho_0 = lambda^2 N / (4 pi A).
double resonant_optical_density(const AtomicSpecies& species, const ProbeGeometry& geometry);

/// Phase shift per unit population difference, lambda^2 S / (2 pi A).
double phase_per_atom(const AtomicSpecies& species, const ProbeGeometry& geometry,
                      double s_coupling);

struct OpticalDephasing {
  /// lambda^2 / (4 pi A) (N_1 S_1 + N_2 S_2)
  double general = 0.0;
  /// rho_0 S e with S = (S_1 - S_2) / 2; equals `general` when S_1 = -S_2.
  double balanced = 0.0;
};

OpticalDephasing optical_dephasing(const AtomicSpecies& species, const ProbeGeometry& geometry,
                                   double s1, double s2);

/// Spontaneous scattering probability per atom, eta = rho_0 / N * C^2 N_p / 2 * L,
/// valid for C << 1 (warns above C = 0.3). Values above 1 are clamped to 1
/// with a warning.
double scattering_probability(double rho0, double n_atoms, double contrast, double n_photons,
                              double lineshape);

/// Decoherence-limited squeezing
///   xi^2 = (1 - eta)^2 / (1 + mu rho_0 eta) + 1 - (1 - eta)^2.
double squeezing_with_decay(double mu, double rho0, double eta);

struct EtaOptimum {
  double eta = 0.0;
  double xi_squared = 1.0;
};

/// Golden-section minimum of squeezing_with_decay over eta in (0, 1), to 1e-6.
EtaOptimum optimize_eta(double mu, double rho0);

struct SnrParams {
  double n_carrier = 0.0;
  double n_sideband = 0.0;
  double n_electronic = 0.0;
};

/// sqrt(N_c N_s / (N_c + N_s + N_e)), proportionality constant 1. Zero when
/// the denominator vanishes.
double snr(const SnrParams& params);

/// Everything derived for a balanced probe: the inputs of the squeezing
/// budget and its optimum.
struct SqueezingBudget {
  double probe_frequency_hz = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double rho0 = 0.0;
  double s_coupling = 0.0;
  double lineshape = 0.0;
  double mu = 0.0;
  double phi = 0.0;
  double eta = 0.0;
  double xi_squared = 1.0;
};

/// Balances the probe, then evaluates rho_0, S, L, mu = S^2 / L, phi and the
/// optimum (eta*, xi^2*).
SqueezingBudget squeezing_budget(const AtomicSpecies& species, const ProbeGeometry& geometry);

/// Photon number that produces scattering probability `eta` at contrast C;
/// the inverse of scattering_probability.
double photons_for_eta(double eta, double rho0, double n_atoms, double contrast,
                       double lineshape);

}  // namespace qndsim
