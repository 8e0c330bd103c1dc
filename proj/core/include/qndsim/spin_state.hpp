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

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qndsim {

using Amplitude = std::complex<double>;

/// Thrown when a kernel leaves a state whose norm is numerically zero.
class DegenerateKernel : public std::runtime_error {
 public:
  explicit DegenerateKernel(const std::string& what) : std::runtime_error(what) {}
};

/// Probabilities below this value (on a unit-norm state) are flushed to
/// exact zero so the hot loop never touches subnormals.
inline constexpr double kProbabilityFloor = 1e-300;

struct SpinMoments {
  double mean_jz = 0.0;
  double var_jz = 0.0;
};

/// Collective state of N two-level atoms in the Dicke (J_z eigen) basis.
///
/// Amplitude index k in [0, N] holds the coefficient of |n> with
/// n = k - N/2, so n is half-integer when N is odd. The state is always
/// normalized. Kernel application tracks the contiguous window of nonzero
/// amplitudes; diagonal kernels can shrink that window but never grow it.
class CollectiveState {
 public:
  /// Normalizes `amplitudes`. Throws std::invalid_argument when the length is
  /// not N+1 and DegenerateKernel when the norm is zero.
  CollectiveState(int n_atoms, std::vector<Amplitude> amplitudes);

  /// Binomial coherent spin state polarized along J_x.
  static CollectiveState coherent(int n_atoms);
  /// Dicke state |n>; `n` must lie in [-N/2, N/2] with the parity of N/2.
  static CollectiveState dicke(int n_atoms, double n);

  int n_atoms() const noexcept { return n_atoms_; }
  std::size_t dimension() const noexcept { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }

  /// J_z eigenvalue carried by index k.
  double eigenvalue(std::size_t k) const noexcept {
    return static_cast<double>(k) - 0.5 * n_atoms_;
  }
  /// Index for eigenvalue n; throws std::out_of_range if n is not a level.
  std::size_t index_of(double n) const;

  /// Half-open window [first, last) outside which every amplitude is zero.
  std::size_t support_begin() const noexcept { return first_; }
  std::size_t support_end() const noexcept { return last_; }

  std::vector<double> probabilities() const;
  double norm_squared() const noexcept;

  /// Multiplies c_k by kernel(k) for k in the support, renormalizes, flushes
  /// probabilities below kProbabilityFloor, then calls visit(k, |c_k|^2) for
  /// every index of the new support.
  ///
  /// Throws DegenerateKernel when the post-kernel norm is below 1e-300; the
  /// amplitudes are unspecified afterwards and the state must be discarded.
  template <class Kernel, class Visitor>
  void transform(Kernel&& kernel, Visitor&& visit);

  template <class Kernel>
  void transform(Kernel&& kernel) {
    transform(std::forward<Kernel>(kernel), [](std::size_t, double) {});
  }

 private:
  void normalize_or_throw();
  void shrink_support() noexcept;

  int n_atoms_;
  std::vector<Amplitude> amplitudes_;
  std::size_t first_ = 0;
  std::size_t last_ = 0;
};

SpinMoments moments(const CollectiveState& state);

/// Coherent spin state c_n(0) = 2^{-N/2} sqrt(N! / ((N/2+n)! (N/2-n)!)).
CollectiveState css_init(int n_atoms);

/// Returns kernel(n) * c_n, renormalized. The kernel receives the J_z
/// eigenvalue n, not the storage index.
CollectiveState apply_diagonal_kernel(const CollectiveState& state,
                                      const std::function<Amplitude(double)>& kernel);

// ---------------------------------------------------------------------------

template <class Kernel, class Visitor>
void CollectiveState::transform(Kernel&& kernel, Visitor&& visit) {
  Amplitude* c = amplitudes_.data();
  const std::size_t first = first_;
  const std::size_t last = last_;

  // Four interleaved partial sums keep the reduction off the critical path;
  // the summation order is fixed, so results stay reproducible.
  double partial[4] = {0.0, 0.0, 0.0, 0.0};
  auto apply = [&](std::size_t k, int lane) {
    const Amplitude kv = kernel(k);
    const double re = c[k].real() * kv.real() - c[k].imag() * kv.imag();
    const double im = c[k].real() * kv.imag() + c[k].imag() * kv.real();
    c[k] = Amplitude(re, im);
    partial[lane] += re * re + im * im;
  };
  std::size_t k = first;
  for (; k + 4 <= last; k += 4) {
    apply(k, 0);
    apply(k + 1, 1);
    apply(k + 2, 2);
    apply(k + 3, 3);
  }
  for (; k < last; ++k) apply(k, 0);
  const double norm = (partial[0] + partial[1]) + (partial[2] + partial[3]);
  if (!(norm >= 1e-300) || !std::isfinite(norm)) {
    throw DegenerateKernel("kernel annihilated the state (norm " + std::to_string(norm) + ")");
  }

  const double scale = 1.0 / std::sqrt(norm);
  for (k = first; k < last; ++k) {
    const double re = c[k].real() * scale;
    const double im = c[k].imag() * scale;
    const bool keep = re * re + im * im >= kProbabilityFloor;
    c[k] = Amplitude(keep ? re : 0.0, keep ? im : 0.0);
  }
  shrink_support();
  for (std::size_t k = first_; k < last_; ++k) visit(k, std::norm(c[k]));
}

}  // namespace qndsim
