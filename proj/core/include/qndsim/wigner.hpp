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

#include <compare>
#include <string>
#include <string_view>

namespace qndsim {

/// Angular-momentum quantum number j in {0, 1/2, 1, 3/2, ...}, stored as 2j.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int integer) : twice_(2 * integer) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  /// Accepts "3/2", "2", "1.5". Throws std::invalid_argument otherwise.
  static HalfInt parse(std::string_view text);

  constexpr int twice() const noexcept { return twice_; }
  constexpr double value() const noexcept { return 0.5 * twice_; }
  constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }
  std::string str() const;

  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

 private:
  int twice_ = 0;
};

/// True when a, b, c satisfy the triangle rule |a-b| <= c <= a+b with an
/// integer sum.
bool triangle(HalfInt a, HalfInt b, HalfInt c) noexcept;

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6} from the Racah single-sum formula,
/// evaluated with log-factorials. Returns exactly 0 when any of the four
/// triads (j1 j2 j3), (j1 j5 j6), (j4 j2 j6), (j4 j5 j3) is not a triangle.
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

}  // namespace qndsim
