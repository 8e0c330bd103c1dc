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

#include <cstdint>
#include <string>
#include <vector>

namespace qndsim::cli {

struct CheckOptions {
  std::uint64_t seed = 20260101;
  /// Product form against sequential updates: max relative magnitude error.
  double product_tolerance = 1e-9;
  int product_sequences = 100;
  int product_length = 100;
  /// Gaussian limit: KL divergence of the simulated posterior from the
  /// closed-form weights.
  double kl_tolerance = 1e-2;
  /// Sub-process reduction: relative error of the integrated strength.
  double reduction_tolerance = 0.01;
  int reduction_resolution = 100;
  /// Born rule: chi-square significance level and ensemble size.
  double alpha = 1e-3;
  int born_trajectories = 1000;
  unsigned workers = 0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Names accepted by run_check, in execution order.
const std::vector<std::string>& check_names();

/// Throws std::invalid_argument for an unknown name.
CheckResult run_check(const std::string& name, const CheckOptions& options);

CheckResult check_product_form(const CheckOptions& options);
CheckResult check_gaussian_kl(const CheckOptions& options);
CheckResult check_subprocess_reduction(const CheckOptions& options);
CheckResult check_born_rule(const CheckOptions& options);

}  // namespace qndsim::cli
