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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qndsim/spin_state.hpp"

namespace qndsim {

/// Spectral beamsplitter and atom-light coupling of the heterodyne probe.
///
/// Holds the branching probabilities T (photon stays in the probe mode) and
/// R = 1 - T, the phase `phi` imprinted per unit of J_z, and the nominal
/// modulation frequency Omega, which only labels outputs.
class InterferometerParams {
 public:
  /// T = 1 - reflection. Throws std::invalid_argument unless
  /// reflection is in [0, 1] and phi >= 0.
  InterferometerParams(double reflection, double phi, double omega = 0.0);

  /// Throws std::invalid_argument unless |T + R - 1| <= 1e-12.
  static InterferometerParams from_split(double transmission, double reflection, double phi,
                                         double omega = 0.0);

  double transmission() const noexcept { return t_; }
  double reflection() const noexcept { return r_; }
  double phi() const noexcept { return phi_; }
  double omega() const noexcept { return omega_; }
  /// Beatnote contrast C = 2 sqrt(R T).
  double contrast() const noexcept { return contrast_; }

 private:
  double t_;
  double r_;
  double phi_;
  double omega_;
  double contrast_;
};

/// A single photon detection, expressed as its phase relative to the local
/// oscillator reference, in [-pi, pi).
struct DetectionEvent {
  double phase = 0.0;
};

struct BeamSplit {
  double transmission = 1.0;
  double reflection = 0.0;
};

/// Branch weights of a single photon after a weak phase modulator with
/// sideband amplitude beta = g t alpha_m. Warns above |beta| = 0.5, where the
/// first-order expansion is no longer trustworthy.
BeamSplit modulator_split(std::complex<double> beta);

/// Distribution of the next detected phase for a fixed atomic state.
///
/// For probabilities p_n the density is
///   P(x) = [1 + C (A cos x + B sin x)] / 2 pi,
/// with A = sum p_n cos(phi n) and B = sum p_n sin(phi n). Carrying only
/// (C, A, B) makes pdf, cdf and inversion O(1) in the atom number.
class PhaseDistribution {
 public:
  PhaseDistribution(double contrast, double cos_moment, double sin_moment) noexcept
      : contrast_(contrast), cos_moment_(cos_moment), sin_moment_(sin_moment) {}

  static PhaseDistribution of(const CollectiveState& state, const InterferometerParams& params);

  double pdf(double phase) const noexcept;
  /// Closed-form integral of pdf over [-pi, phase], clamped to [0, 1].
  double cdf(double phase) const noexcept;
  /// Inverts cdf by bisection on [-pi, pi] to 1e-10 rad. u <= 0 maps to -pi.
  DetectionEvent sample(double u) const noexcept;

  double contrast() const noexcept { return contrast_; }
  double cos_moment() const noexcept { return cos_moment_; }
  double sin_moment() const noexcept { return sin_moment_; }

 private:
  double contrast_;
  double cos_moment_;
  double sin_moment_;
};

inline constexpr double kPhaseTolerance = 1e-10;
inline constexpr int kMaxBisectionSteps = 60;

double phase_pdf(const CollectiveState& state, const InterferometerParams& params, double phase);
double phase_cdf(const CollectiveState& state, const InterferometerParams& params, double phase);
DetectionEvent sample_phase(const CollectiveState& state, const InterferometerParams& params,
                            double u);

/// One step of the stochastic recurrence: multiplies c_n by
///   K(n) = (sqrt T + sqrt R) cos((phi n - x)/2) + i (sqrt T - sqrt R) sin((phi n - x)/2)
/// and renormalizes. |K(n)|^2 = 1 + C cos(phi n - x).
CollectiveState apply_detection(const CollectiveState& state, const InterferometerParams& params,
                                DetectionEvent event);

/// log |F(n)|^2 = sum_k log(1 + C cos(phi n - x_k)), up to an n-independent
/// constant. Returns -inf only when a factor is exactly zero.
double backaction_weight(const InterferometerParams& params, std::span<const double> phases,
                         double n);

/// backaction_weight for every level of an N-atom register, indexed like
/// CollectiveState amplitudes.
std::vector<double> backaction_weights(const InterferometerParams& params,
                                       std::span<const double> phases, int n_atoms);

/// Initial amplitudes reweighted by exp(log_weight / 2) and normalized: the
/// closed product form of a whole detection record.
CollectiveState reweight(const CollectiveState& initial, std::span<const double> log_weights);

/// Per-level trigonometric tables for one (N, params) pair, reused across
/// the photons of a trajectory.
class HeterodyneProbe {
 public:
  HeterodyneProbe(int n_atoms, const InterferometerParams& params);

  struct Step {
    PhaseDistribution next;
    double mean_jz;
  };

  const InterferometerParams& params() const noexcept { return params_; }
  int n_atoms() const noexcept { return n_atoms_; }

  PhaseDistribution distribution(const CollectiveState& state) const;

  /// Applies the detection kernel in place and returns, from the same pass,
  /// the phase distribution of the next photon and the new <J_z>.
  /// Propagates DegenerateKernel.
  Step detect(CollectiveState& state, DetectionEvent event) const;

 private:
  int n_atoms_;
  InterferometerParams params_;
  double sum_amp_;   // sqrt T + sqrt R
  double diff_amp_;  // sqrt T - sqrt R
  std::vector<double> half_cos_;
  std::vector<double> half_sin_;
  std::vector<double> full_cos_;
  std::vector<double> full_sin_;
};

}  // namespace qndsim
