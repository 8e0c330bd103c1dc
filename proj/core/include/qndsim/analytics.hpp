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
#include <stdexcept>
#include <string>
#include <vector>

#include "qndsim/measurement.hpp"
#include "qndsim/spin_state.hpp"

namespace qndsim {

/// Factor used wherever a validity condition reads "a << b" or "a >> b".
/// Conditions are checked as a * kMuchFactor <= b and reported, never assumed.
inline constexpr double kMuchFactor = 10.0;

struct WeakCouplingTheory {
  double m_squared = 0.0;      // measurement strength M^2
  double kappa_squared = 0.0;  // signal-to-noise M^2 N_at N_p
  double xi_squared = 1.0;     // squeezing factor 1 / (1 + kappa^2)
  double delta_phi_bar = 0.0;  // trajectory-averaged phase offset (rad)
};

/// M^2 = phi^2 / 4 (1 - sqrt(1 - C^2)).
double measurement_strength(const InterferometerParams& params);
double measurement_strength(double phi, double contrast);

WeakCouplingTheory weak_coupling_theory(int n_atoms, double n_photons,
                                        const InterferometerParams& params,
                                        double delta_phi_bar = 0.0);

/// Gaussian short-time moments:
///   <J_z> = -C^2 xi^2 kappa^2 dphi / phi,   var J_z = xi^2 N_at / 4.
/// Warns when N_p M^2 exceeds 1 / kMuchFactor.
SpinMoments short_time_moments(int n_atoms, double n_photons, const InterferometerParams& params,
                               double delta_phi_bar);

/// Weak-coupling back-action log-weight -2 M^2 N_p (n^2 + 2 dphi n / phi).
/// Warns when phi N_at exceeds 1 / kMuchFactor.
double gaussian_backaction(int n_atoms, double n_photons, const InterferometerParams& params,
                           double delta_phi_bar, double n);

/// gaussian_backaction for every level, indexed like CollectiveState amplitudes.
std::vector<double> gaussian_backaction_weights(int n_atoms, double n_photons,
                                                const InterferometerParams& params,
                                                double delta_phi_bar);

struct VarianceBounds {
  double upper = 0.25;
  double lower = 0.0;
};

/// Long-time variance envelope: 1/4 for a state straddling two levels and
/// 2 exp(-2 M^2 N_p) for one centred on a level.
VarianceBounds long_time_bounds(double m_squared, double n_photons);

/// Thrown when C + cos(pi l / m) = 0, where the sub-process centre n_l is
/// undefined.
class SingularBin : public std::domain_error {
 public:
  explicit SingularBin(const std::string& what) : std::domain_error(what) {}
};

struct SubprocessQuantities {
  double m_squared_l = 0.0;
  double n_l = 0.0;
};

/// Gaussian strength M_l^2 and centre n_l of the photons detected in phase
/// bin l (resolution pi / m). Requires -m <= l <= m.
SubprocessQuantities subprocess_quantities(const InterferometerParams& params, int l, int m);

/// M_l^2 alone; defined for every bin including the singular ones. Infinite
/// only at C = 1 on the two edge bins, where P0 vanishes.
double subprocess_strength(const InterferometerParams& params, int l, int m);

/// Sum over l in [-m, m] of (pi/m) P0(pi l/m) M_l^2 with half weight on the
/// two endpoints, which both sit at phase +-pi. Converges to M^2.
double integrated_subprocess_strength(const InterferometerParams& params, int m);

/// N_t [(1 - C)/(2m) + pi^2 C / (12 m^3)]: expected photons in an edge bin.
double subprocess_edge_count(double n_t, int m, double contrast);

/// True when subprocess_edge_count >= kMuchFactor.
bool subprocess_validity(double n_t, int m, double contrast);

/// Running estimators of the trajectory-averaged phase offset from a detection
/// record.
///
/// delta_phi_bar() is the score-weighted mean: the one-step maximum-likelihood
/// estimate of the shift of the detected-phase distribution, averaged over
/// the record, with the sign convention dphi = -phi <J_z>. It is the value
/// that makes the Gaussian back-action reproduce the linear term of the exact
/// log-likelihood. phase_mean() is the plain arithmetic mean of the phases
/// and jz_proxy() is -phi times the running mean of <J_z>.
class PhaseOffsetEstimator {
 public:
  explicit PhaseOffsetEstimator(const InterferometerParams& params);

  void add(double phase, double mean_jz_before);

  std::uint64_t count() const noexcept { return count_; }
  double phase_mean() const noexcept;
  double delta_phi_bar() const noexcept;
  double jz_proxy() const noexcept;

 private:
  double contrast_;
  double phi_;
  double fisher_;  // 1 - sqrt(1 - C^2)
  std::uint64_t count_ = 0;
  double phase_sum_ = 0.0;
  double score_sum_ = 0.0;
  double jz_sum_ = 0.0;
};

}  // namespace qndsim
