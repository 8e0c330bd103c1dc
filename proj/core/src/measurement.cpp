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

#include "qndsim/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qndsim/diagnostics.hpp"

namespace qndsim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Offsets q * 2 pi / 4^level (q = 1, 2, 3) and their sin/cos, so stepping the
// bracket uses angle addition instead of fresh trig calls.
struct BisectionTable {
  static constexpr int kLevels = kMaxBisectionSteps / 2;
  std::array<std::array<double, 4>, kLevels + 1> offset{};
  std::array<std::array<double, 4>, kLevels + 1> sin_o{};
  std::array<std::array<double, 4>, kLevels + 1> cos_o{};

  BisectionTable() {
    for (int level = 0; level <= kLevels; ++level) {
      for (int q = 0; q < 4; ++q) {
        offset[level][q] = q * std::ldexp(kTwoPi, -2 * level - 2);
        sin_o[level][q] = std::sin(offset[level][q]);
        cos_o[level][q] = std::cos(offset[level][q]);
      }
    }
  }
};

const BisectionTable& bisection_table() {
  static const BisectionTable table;
  return table;
}

}  // namespace

InterferometerParams::InterferometerParams(double reflection, double phi, double omega)
    : t_(1.0 - reflection), r_(reflection), phi_(phi), omega_(omega) {
  if (!(reflection >= 0.0 && reflection <= 1.0)) {
    throw std::invalid_argument("reflection R must lie in [0, 1]");
  }
  if (!(phi >= 0.0) || !std::isfinite(phi)) {
    throw std::invalid_argument("per-atom phase phi must be finite and >= 0");
  }
  contrast_ = std::min(1.0, 2.0 * std::sqrt(r_ * t_));
}

InterferometerParams InterferometerParams::from_split(double transmission, double reflection,
                                                      double phi, double omega) {
  if (!(transmission >= 0.0 && transmission <= 1.0) ||
      std::abs(transmission + reflection - 1.0) > 1e-12) {
    throw std::invalid_argument("beamsplitter requires T, R in [0, 1] with R + T = 1");
  }
  return InterferometerParams(reflection, phi, omega);
}

BeamSplit modulator_split(std::complex<double> beta) {
  const double depth = std::norm(beta);
  if (!std::isfinite(depth)) throw std::invalid_argument("modulation amplitude must be finite");
  if (std::abs(beta) > 0.5) {
    warn("modulator_split: |beta| > 0.5 is outside the weak-modulation expansion");
  }
  return {1.0 / (1.0 + depth), depth / (1.0 + depth)};
}

// ---------------------------------------------------------------------------

PhaseDistribution PhaseDistribution::of(const CollectiveState& state,
                                        const InterferometerParams& params) {
  const auto c = state.amplitudes();
  double a = 0.0;
  double b = 0.0;
  for (std::size_t k = state.support_begin(); k < state.support_end(); ++k) {
    const double p = std::norm(c[k]);
    const double angle = params.phi() * state.eigenvalue(k);
    a += p * std::cos(angle);
    b += p * std::sin(angle);
  }
  return {params.contrast(), a, b};
}

double PhaseDistribution::pdf(double phase) const noexcept {
  const double density =
      1.0 + contrast_ * (cos_moment_ * std::cos(phase) + sin_moment_ * std::sin(phase));
  return std::max(0.0, density) / kTwoPi;
}

double PhaseDistribution::cdf(double phase) const noexcept {
  // Per level: int_{-pi}^{x} cos(t - a) dt = sin(x - a) - sin(a).
  const double value =
      (phase + kPi) + contrast_ * (cos_moment_ * std::sin(phase) -
                                   sin_moment_ * std::cos(phase) - sin_moment_);
  return std::clamp(value / kTwoPi, 0.0, 1.0);
}

DetectionEvent PhaseDistribution::sample(double u) const noexcept {
  if (!(u > 0.0)) return {-kPi};
  const auto& table = bisection_table();
  const double target = u * kTwoPi;
  const double ca = contrast_ * cos_moment_;
  const double cb = contrast_ * sin_moment_;

  // Two bisection steps per level: the bracket [lo, lo + 4 w] is cut at its
  // three quarter points, which are independent of each other.
  double lo = -kPi;
  double sin_lo = 0.0;
  double cos_lo = -1.0;
  double width = kTwoPi;
  for (int level = 0; level < BisectionTable::kLevels && width > kPhaseTolerance; ++level) {
    const auto& off = table.offset[level];
    const auto& so = table.sin_o[level];
    const auto& co = table.cos_o[level];
    double sin_q[4] = {sin_lo, 0.0, 0.0, 0.0};
    double cos_q[4] = {cos_lo, 0.0, 0.0, 0.0};
    int below = 0;
    for (int q = 1; q < 4; ++q) {
      sin_q[q] = sin_lo * co[q] + cos_lo * so[q];
      cos_q[q] = cos_lo * co[q] - sin_lo * so[q];
      const double scaled_cdf = (lo + off[q] + kPi) + ca * sin_q[q] - cb * cos_q[q] - cb;
      below += scaled_cdf < target ? 1 : 0;
    }
    lo += off[below];
    sin_lo = sin_q[below];
    cos_lo = cos_q[below];
    width = off[1];
  }
  return {std::min(lo + 0.5 * width, std::nextafter(kPi, 0.0))};
}

double phase_pdf(const CollectiveState& state, const InterferometerParams& params, double phase) {
  return PhaseDistribution::of(state, params).pdf(phase);
}

double phase_cdf(const CollectiveState& state, const InterferometerParams& params, double phase) {
  return PhaseDistribution::of(state, params).cdf(phase);
}

DetectionEvent sample_phase(const CollectiveState& state, const InterferometerParams& params,
                            double u) {
  return PhaseDistribution::of(state, params).sample(u);
}

CollectiveState apply_detection(const CollectiveState& state, const InterferometerParams& params,
                                DetectionEvent event) {
  CollectiveState out = state;
  HeterodyneProbe(state.n_atoms(), params).detect(out, event);
  return out;
}

double backaction_weight(const InterferometerParams& params, std::span<const double> phases,
                         double n) {
  // 1 + C cos(t) written as (sqrt T + sqrt R)^2 cos^2(t/2) + (sqrt T - sqrt R)^2 sin^2(t/2):
  // near a dark fringe this keeps the relative accuracy that log1p(C cos t)
  // loses to cancellation.
  const double s = std::sqrt(params.transmission()) + std::sqrt(params.reflection());
  const double d = std::sqrt(params.transmission()) - std::sqrt(params.reflection());
  double log_weight = 0.0;
  for (const double x : phases) {
    const double half = 0.5 * (params.phi() * n - x);
    const double cx = s * std::cos(half);
    const double sx = d * std::sin(half);
    log_weight += std::log(cx * cx + sx * sx);
  }
  return log_weight;
}

std::vector<double> backaction_weights(const InterferometerParams& params,
                                       std::span<const double> phases, int n_atoms) {
  std::vector<double> w(static_cast<std::size_t>(n_atoms) + 1);
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = backaction_weight(params, phases, static_cast<double>(k) - 0.5 * n_atoms);
  }
  return w;
}

CollectiveState reweight(const CollectiveState& initial, std::span<const double> log_weights) {
  if (log_weights.size() != initial.dimension()) {
    throw std::invalid_argument("reweight: one log-weight per level required");
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t k = initial.support_begin(); k < initial.support_end(); ++k) {
    peak = std::max(peak, log_weights[k]);
  }
  if (!std::isfinite(peak)) throw DegenerateKernel("reweight: every level has zero weight");
  std::vector<Amplitude> c(initial.amplitudes().begin(), initial.amplitudes().end());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::exp(0.5 * (log_weights[k] - peak));
  return CollectiveState(initial.n_atoms(), std::move(c));
}

// ---------------------------------------------------------------------------

HeterodyneProbe::HeterodyneProbe(int n_atoms, const InterferometerParams& params)
    : n_atoms_(n_atoms),
      params_(params),
      sum_amp_(std::sqrt(params.transmission()) + std::sqrt(params.reflection())),
      diff_amp_(std::sqrt(params.transmission()) - std::sqrt(params.reflection())) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const auto dim = static_cast<std::size_t>(n_atoms) + 1;
  half_cos_.resize(dim);
  half_sin_.resize(dim);
  full_cos_.resize(dim);
  full_sin_.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double angle = params.phi() * (static_cast<double>(k) - 0.5 * n_atoms);
    half_cos_[k] = std::cos(0.5 * angle);
    half_sin_[k] = std::sin(0.5 * angle);
    full_cos_[k] = std::cos(angle);
    full_sin_[k] = std::sin(angle);
  }
}

PhaseDistribution HeterodyneProbe::distribution(const CollectiveState& state) const {
  const auto c = state.amplitudes();
  double a = 0.0;
  double b = 0.0;
  for (std::size_t k = state.support_begin(); k < state.support_end(); ++k) {
    const double p = std::norm(c[k]);
    a += p * full_cos_[k];
    b += p * full_sin_[k];
  }
  return {params_.contrast(), a, b};
}

HeterodyneProbe::Step HeterodyneProbe::detect(CollectiveState& state, DetectionEvent event) const {
  if (state.n_atoms() != n_atoms_) throw std::invalid_argument("probe/state atom number mismatch");
  const double cos_b = std::cos(0.5 * event.phase);
  const double sin_b = std::sin(0.5 * event.phase);
  const double* hc = half_cos_.data();
  const double* hs = half_sin_.data();
  const double* fc = full_cos_.data();
  const double* fs = full_sin_.data();
  const double s = sum_amp_;
  const double d = diff_amp_;

  state.transform([=](std::size_t k) {
    // cos and sin of (phi n - x)/2 by angle subtraction.
    const double cx = hc[k] * cos_b + hs[k] * sin_b;
    const double sx = hs[k] * cos_b - hc[k] * sin_b;
    return Amplitude(s * cx, d * sx);
  });

  const Amplitude* c = state.amplitudes().data();
  const double offset = 0.5 * n_atoms_;
  double a[2] = {0.0, 0.0};
  double b[2] = {0.0, 0.0};
  double m[2] = {0.0, 0.0};
  auto accumulate = [&](std::size_t k, int lane) {
    const double p = c[k].real() * c[k].real() + c[k].imag() * c[k].imag();
    a[lane] += p * fc[k];
    b[lane] += p * fs[k];
    m[lane] += p * (static_cast<double>(k) - offset);
  };
  std::size_t k = state.support_begin();
  const std::size_t end = state.support_end();
  for (; k + 2 <= end; k += 2) {
    accumulate(k, 0);
    accumulate(k + 1, 1);
  }
  if (k < end) accumulate(k, 0);
  const double mean = m[0] + m[1];
  return {PhaseDistribution(params_.contrast(), a[0] + a[1], b[0] + b[1]), mean};
}

}  // namespace qndsim
