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

#include "qndsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace qndsim::stats {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return INFINITY;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

GoodnessOfFit chi_square_test(std::span<const double> counts,
                              std::span<const double> probabilities, double min_expected) {
  if (counts.size() != probabilities.size()) {
    throw std::invalid_argument("chi_square_test: size mismatch");
  }
  double total = 0.0;
  for (const double c : counts) total += c;
  double prob_total = 0.0;
  for (const double p : probabilities) prob_total += p;

  std::vector<double> observed;
  std::vector<double> expected;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs_acc += counts[i];
    exp_acc += total * probabilities[i] / prob_total;
    if (exp_acc >= min_expected) {
      observed.push_back(obs_acc);
      expected.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (expected.empty()) {
      observed.push_back(obs_acc);
      expected.push_back(exp_acc);
    } else {
      observed.back() += obs_acc;
      expected.back() += exp_acc;
    }
  }

  GoodnessOfFit fit;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - expected[i];
    fit.statistic += d * d / expected[i];
  }
  fit.degrees_of_freedom = static_cast<double>(observed.size()) - 1.0;
  if (fit.degrees_of_freedom >= 1.0) {
    boost::math::chi_squared dist(fit.degrees_of_freedom);
    fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.statistic));
  }
  return fit;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

GoodnessOfFit ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root_n = std::sqrt(n);
  GoodnessOfFit fit;
  fit.statistic = d;
  fit.degrees_of_freedom = n;
  fit.p_value = kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d);
  return fit;
}

}  // namespace qndsim::stats
