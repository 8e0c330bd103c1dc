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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qndsim::stats {

/// Recursive pairwise summation; error grows as O(log n) rather than O(n).
double pairwise_sum(std::span<const double> values);

/// Kullback-Leibler divergence sum p log(p / q) of two normalized
/// distributions on the same support. Terms with p = 0 contribute nothing.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct GoodnessOfFit {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-square test of counts against bin probabilities. Adjacent bins
/// are merged, in order, until every merged bin expects at least
/// `min_expected` counts.
GoodnessOfFit chi_square_test(std::span<const double> counts,
                              std::span<const double> probabilities, double min_expected = 5.0);

/// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

/// One-sample Kolmogorov-Smirnov test (Stephens' finite-n correction).
GoodnessOfFit ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace qndsim::stats
