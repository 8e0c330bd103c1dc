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

#include "qndsim/spin_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qndsim {
namespace {

std::size_t level_index(int n_atoms, double n) {
  const double k = n + 0.5 * n_atoms;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 0.0 || rounded > n_atoms) {
    throw std::out_of_range("no Dicke level with J_z = " + std::to_string(n));
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

CollectiveState::CollectiveState(int n_atoms, std::vector<Amplitude> amplitudes)
    : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  if (amplitudes_.size() != static_cast<std::size_t>(n_atoms) + 1) {
    throw std::invalid_argument("amplitude vector length must be n_atoms + 1");
  }
  first_ = 0;
  last_ = amplitudes_.size();
  normalize_or_throw();
}

CollectiveState CollectiveState::coherent(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  const auto n = static_cast<double>(n_atoms);
  const double log_total = std::lgamma(n + 1.0) - n * std::numbers::ln2;
  std::vector<Amplitude> c(static_cast<std::size_t>(n_atoms) + 1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto up = static_cast<double>(k);
    const double log_p = log_total - (std::lgamma(up + 1.0) + std::lgamma(n - up + 1.0));
    c[k] = std::exp(0.5 * log_p);
  }
  return CollectiveState(n_atoms, std::move(c));
}

CollectiveState CollectiveState::dicke(int n_atoms, double n) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  std::vector<Amplitude> c(static_cast<std::size_t>(n_atoms) + 1);
  c[level_index(n_atoms, n)] = 1.0;
  return CollectiveState(n_atoms, std::move(c));
}

std::size_t CollectiveState::index_of(double n) const { return level_index(n_atoms_, n); }

std::vector<double> CollectiveState::probabilities() const {
  std::vector<double> p(amplitudes_.size(), 0.0);
  for (std::size_t k = first_; k < last_; ++k) p[k] = std::norm(amplitudes_[k]);
  return p;
}

double CollectiveState::norm_squared() const noexcept {
  double s = 0.0;
  for (std::size_t k = first_; k < last_; ++k) s += std::norm(amplitudes_[k]);
  return s;
}

void CollectiveState::normalize_or_throw() {
  double norm = 0.0;
  for (const auto& a : amplitudes_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("non-finite amplitude");
    }
    norm += std::norm(a);
  }
  if (!(norm >= 1e-300)) throw DegenerateKernel("state has zero norm");
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& a : amplitudes_) {
    a *= scale;
    if (std::norm(a) < kProbabilityFloor) a = 0.0;
  }
  shrink_support();
}

void CollectiveState::shrink_support() noexcept {
  while (first_ < last_ && amplitudes_[first_] == Amplitude(0.0, 0.0)) ++first_;
  while (last_ > first_ && amplitudes_[last_ - 1] == Amplitude(0.0, 0.0)) --last_;
}

SpinMoments moments(const CollectiveState& state) {
  const auto c = state.amplitudes();
  double mean = 0.0;
  for (std::size_t k = state.support_begin(); k < state.support_end(); ++k) {
    mean += state.eigenvalue(k) * std::norm(c[k]);
  }
  // Centered second pass: a near-Dicke state at large |n| would otherwise
  // lose the variance to cancellation.
  double var = 0.0;
  for (std::size_t k = state.support_begin(); k < state.support_end(); ++k) {
    const double d = state.eigenvalue(k) - mean;
    var += d * d * std::norm(c[k]);
  }
  return {mean, var};
}

CollectiveState css_init(int n_atoms) { return CollectiveState::coherent(n_atoms); }

CollectiveState apply_diagonal_kernel(const CollectiveState& state,
                                      const std::function<Amplitude(double)>& kernel) {
  CollectiveState out = state;
  out.transform([&](std::size_t k) { return kernel(out.eigenvalue(k)); });
  return out;
}

}  // namespace qndsim
