/*
 * Copyright 2026 The RethinkNet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rethink/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "rethink/error.hpp"

namespace rethink {

GradCheckResult gradient_check(const std::function<double()>& loss, std::span<Tensor* const> params,
                               std::span<const Tensor> analytic, const GradCheckOptions& options) {
  if (params.size() != analytic.size()) throw DimensionError("gradient_check: parameter/gradient count mismatch");
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], analytic[i], "gradient_check");
    for (std::size_t j = 0; j < params[i]->size(); ++j) entries.emplace_back(i, j);
  }
  if (entries.size() > options.max_checked) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(entries.begin(), entries.end(), rng);
    entries.resize(options.max_checked);
  }

  GradCheckResult result;
  for (const auto& [pi, j] : entries) {
    double& x = params[pi]->values()[j];
    const double saved = x;
    x = saved + options.step;
    const double up = loss();
    x = saved - options.step;
    const double down = loss();
    x = saved;
    const double numeric = (up - down) / (2.0 * options.step);
    const double a = analytic[pi].values()[j];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
    ++result.checked;
    if (err > result.max_relative_error || result.checked == 1) {
      result.max_relative_error = err;
      result.worst_param = pi;
      result.worst_offset = j;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace rethink
