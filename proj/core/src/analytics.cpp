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

#include "qndsim/analytics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "qndsim/diagnostics.hpp"

namespace qndsim {
namespace {

constexpr double kPi = std::numbers::pi;

double bin_angle(int l, int m) {
  if (m < 1) throw std::invalid_argument("phase resolution m must be >= 1");
  if (l < -m || l > m) throw std::invalid_argument("bin index l must satisfy -m <= l <= m");
  return kPi * static_cast<double>(l) / static_cast<double>(m);
}

}  // namespace

double measurement_strength(double phi, double contrast) {
  return 0.25 * phi * phi * (1.0 - std::sqrt(std::max(0.0, 1.0 - contrast * contrast)));
}

double measurement_strength(const InterferometerParams& params) {
  return measurement_strength(params.phi(), params.contrast());
}

WeakCouplingTheory weak_coupling_theory(int n_atoms, double n_photons,
                                        const InterferometerParams& params,
                                        double delta_phi_bar) {
  WeakCouplingTheory theory;
  theory.m_squared = measurement_strength(params);
  theory.kappa_squared = theory.m_squared * n_atoms * n_photons;
  theory.xi_squared = 1.0 / (1.0 + theory.kappa_squared);
  theory.delta_phi_bar = delta_phi_bar;
  return theory;
}

SpinMoments short_time_moments(int n_atoms, double n_photons, const InterferometerParams& params,
                               double delta_phi_bar) {
  const auto theory = weak_coupling_theory(n_atoms, n_photons, params, delta_phi_bar);
  if (n_photons * theory.m_squared * kMuchFactor > 1.0) {
    warn(fmt::format("short_time_moments: N_p M^2 = {:.3g} is outside the short-time regime",
                     n_photons * theory.m_squared));
  }
  SpinMoments out;
  out.var_jz = theory.xi_squared * n_atoms / 4.0;
  if (params.phi() > 0.0) {
    const double c = params.contrast();
    out.mean_jz = -c * c * theory.xi_squared * theory.kappa_squared * delta_phi_bar / params.phi();
  }
  return out;
}

double gaussian_backaction(int n_atoms, double n_photons, const InterferometerParams& params,
                           double delta_phi_bar, double n) {
  if (params.phi() * n_atoms * kMuchFactor > 1.0) {
    warn(fmt::format("gaussian_backaction: phi N_at = {:.3g} is outside weak coupling",
                     params.phi() * n_atoms));
  }
  const double m2 = measurement_strength(params);
  const double linear = params.phi() > 0.0 ? 2.0 * delta_phi_bar * n / params.phi() : 0.0;
  return -2.0 * m2 * n_photons * (n * n + linear);
}

std::vector<double> gaussian_backaction_weights(int n_atoms, double n_photons,
                                                const InterferometerParams& params,
                                                double delta_phi_bar) {
  std::vector<double> w(static_cast<std::size_t>(n_atoms) + 1);
  // Evaluate once for the diagnostic, then reuse the closed form.
  w[0] = gaussian_backaction(n_atoms, n_photons, params, delta_phi_bar, -0.5 * n_atoms);
  const double m2 = measurement_strength(params);
  const double shift = params.phi() > 0.0 ? 2.0 * delta_phi_bar / params.phi() : 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) {
    const double n = static_cast<double>(k) - 0.5 * n_atoms;
    w[k] = -2.0 * m2 * n_photons * (n * n + shift * n);
  }
  return w;
}

VarianceBounds long_time_bounds(double m_squared, double n_photons) {
  if (m_squared * n_photons < kMuchFactor) {
    warn(fmt::format("long_time_bounds: M^2 N_p = {:.3g} is outside the long-time regime",
                     m_squared * n_photons));
  }
  return {0.25, 2.0 * std::exp(-2.0 * m_squared * n_photons)};
}

double subprocess_strength(const InterferometerParams& params, int l, int m) {
  const double c = params.contrast();
  const double cos_l = std::cos(bin_angle(l, m));
  const double denom = 1.0 + c * cos_l;
  // Only reachable at C = 1 on the phase +-pi edge, where P0 vanishes too.
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return c * params.phi() * params.phi() / 4.0 * (c + cos_l) / (denom * denom);
}

SubprocessQuantities subprocess_quantities(const InterferometerParams& params, int l, int m) {
  const double angle = bin_angle(l, m);
  const double c = params.contrast();
  const double cos_l = std::cos(angle);
  const double pole = c + cos_l;
  if (std::abs(pole) <= 1e-12) {
    throw SingularBin(fmt::format("C + cos(pi l/m) vanishes for l={}, m={}", l, m));
  }
  SubprocessQuantities q;
  q.m_squared_l = subprocess_strength(params, l, m);
  if (l == 0) {
    q.n_l = 0.0;
  } else {
    q.n_l = params.phi() > 0.0 ? (1.0 + c * cos_l) / pole * std::sin(angle) / params.phi() : 0.0;
  }
  return q;
}

double integrated_subprocess_strength(const InterferometerParams& params, int m) {
  const double c = params.contrast();
  const double bin = kPi / static_cast<double>(m);
  double total = 0.0;
  for (int l = -m; l <= m; ++l) {
    // P0 M_l^2 with one factor of (1 + C cos) cancelled, finite even at C = 1.
    const double cos_l = std::cos(bin_angle(l, m));
    const double p0_strength =
        c * params.phi() * params.phi() / 4.0 * (c + cos_l) / (2.0 * kPi * (1.0 + c * cos_l));
    const double weight = (l == -m || l == m) ? 0.5 : 1.0;
    total += weight * bin * (c == 1.0 && cos_l == -1.0 ? c * params.phi() * params.phi() / (8.0 * kPi)
                                                        : p0_strength);
  }
  return total;
}

double subprocess_edge_count(double n_t, int m, double contrast) {
  if (m < 1) throw std::invalid_argument("phase resolution m must be >= 1");
  const double md = static_cast<double>(m);
  return n_t * ((1.0 - contrast) / (2.0 * md) + kPi * kPi * contrast / (12.0 * md * md * md));
}

bool subprocess_validity(double n_t, int m, double contrast) {
  return subprocess_edge_count(n_t, m, contrast) >= kMuchFactor;
}

// ---------------------------------------------------------------------------

PhaseOffsetEstimator::PhaseOffsetEstimator(const InterferometerParams& params)
    : contrast_(params.contrast()),
      phi_(params.phi()),
      fisher_(1.0 - std::sqrt(std::max(0.0, 1.0 - params.contrast() * params.contrast()))) {}

void PhaseOffsetEstimator::add(double phase, double mean_jz_before) {
  ++count_;
  phase_sum_ += phase;
  jz_sum_ += mean_jz_before;
  const double denom = 1.0 + contrast_ * std::cos(phase);
  const double score = contrast_ * std::sin(phase) / denom;
  // A phase exactly on a dark fringe has zero probability; its score is
  // not finite and carries no usable information.
  if (std::isfinite(score)) score_sum_ += score;
}

double PhaseOffsetEstimator::phase_mean() const noexcept {
  return count_ == 0 ? 0.0 : phase_sum_ / static_cast<double>(count_);
}

double PhaseOffsetEstimator::delta_phi_bar() const noexcept {
  if (count_ == 0 || fisher_ <= 0.0) return 0.0;
  return -score_sum_ / (static_cast<double>(count_) * fisher_);
}

double PhaseOffsetEstimator::jz_proxy() const noexcept {
  return count_ == 0 ? 0.0 : -phi_ * jz_sum_ / static_cast<double>(count_);
}

}  // namespace qndsim
