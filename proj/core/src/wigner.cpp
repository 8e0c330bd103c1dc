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

#include "qndsim/wigner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace qndsim {
namespace {

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// log Delta(abc) with arguments given as 2j.
double log_triangle_coefficient(int a, int b, int c) {
  return 0.5 * (log_factorial((a + b - c) / 2) + log_factorial((a - b + c) / 2) +
                log_factorial((-a + b + c) / 2) - log_factorial((a + b + c) / 2 + 1));
}

bool triangle_twice(int a, int b, int c) {
  return a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c >= std::abs(a - b) && c <= a + b;
}

int parse_int(std::string_view s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace

HalfInt HalfInt::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty angular momentum");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const int num = parse_int(text.substr(0, slash));
    const int den = parse_int(text.substr(slash + 1));
    if (den == 1) return HalfInt(num);
    if (den != 2 || num % 2 == 0) {
      throw std::invalid_argument("angular momentum must be integer or half-integer: '" +
                                  std::string(text) + "'");
    }
    return from_twice(num);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  const double twice = 2.0 * value;
  if (std::abs(twice - std::round(twice)) > 1e-12) {
    throw std::invalid_argument("angular momentum must be integer or half-integer: '" +
                                std::string(text) + "'");
  }
  return from_twice(static_cast<int>(std::lround(twice)));
}

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

bool triangle(HalfInt a, HalfInt b, HalfInt c) noexcept {
  return triangle_twice(a.twice(), b.twice(), c.twice());
}

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  const int a = j1.twice(), b = j2.twice(), c = j3.twice();
  const int d = j4.twice(), e = j5.twice(), f = j6.twice();
  if (!triangle_twice(a, b, c) || !triangle_twice(a, e, f) || !triangle_twice(d, b, f) ||
      !triangle_twice(d, e, c)) {
    return 0.0;
  }
  const double log_prefactor = log_triangle_coefficient(a, b, c) +
                               log_triangle_coefficient(a, e, f) +
                               log_triangle_coefficient(d, b, f) +
                               log_triangle_coefficient(d, e, c);

  // All triad sums and column-pair sums are even, so the halves are exact.
  const int abc = (a + b + c) / 2, aef = (a + e + f) / 2, dbf = (d + b + f) / 2,
            dec = (d + e + c) / 2;
  const int abde = (a + b + d + e) / 2, acdf = (a + c + d + f) / 2, bcef = (b + c + e + f) / 2;
  const int t_min = std::max({abc, aef, dbf, dec});
  const int t_max = std::min({abde, acdf, bcef});

  double sum = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    const double log_term = log_factorial(t + 1) - log_factorial(t - abc) -
                            log_factorial(t - aef) - log_factorial(t - dbf) -
                            log_factorial(t - dec) - log_factorial(abde - t) -
                            log_factorial(acdf - t) - log_factorial(bcef - t);
    const double term = std::exp(log_term + log_prefactor);
    sum += (t % 2 == 0) ? term : -term;
  }
  return sum;
}

}  // namespace qndsim
