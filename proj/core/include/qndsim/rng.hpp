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

#include <array>
#include <cstdint>

namespace qndsim {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A (key, counter) pair fully determines the output block, so a trajectory
/// stream is addressed by (master seed, trajectory index) with no shared
/// state between workers.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// Uniform doubles for one trajectory. Counter words 2..3 hold the trajectory
/// index and words 0..1 a running block number.
class TrajectoryRng {
 public:
  TrajectoryRng(std::uint64_t master_seed, std::uint64_t stream) noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  std::uint64_t next_u64() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace qndsim
