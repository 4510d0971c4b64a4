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

#ifndef RETHINK_GRADIENT_CHECK_HPP_
#define RETHINK_GRADIENT_CHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "rethink/tensor.hpp"

namespace rethink {

struct GradCheckOptions {
  double step = 1e-5;
  // Above this many scalars a random subsample of this size is checked.
  std::size_t max_checked = 10000;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Location of the worst entry: parameter index and flat offset.
  std::size_t worst_param = 0;
  std::size_t worst_offset = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares `analytic[i]` against central differences of `loss` over every
/// scalar of `params[i]`. `loss` must read the parameters through the same
/// pointers; each entry is perturbed in place and restored.
///
/// Relative error per entry: |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult gradient_check(const std::function<double()>& loss, std::span<Tensor* const> params,
                               std::span<const Tensor> analytic, const GradCheckOptions& options = {});

}  // namespace rethink

#endif  // RETHINK_GRADIENT_CHECK_HPP_
