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

#ifndef RETHINK_LOSS_HPP_
#define RETHINK_LOSS_HPP_

#include "rethink/tensor.hpp"

namespace rethink {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before the log.
inline constexpr double kProbClamp = 1e-7;

/// (1/N) sum_n sum_i -w[n,i] * (y log p + (1 - y) log(1 - p)).
double weighted_bce(const Tensor& p, const Tensor& y, const Tensor& w);

/// dL/dp of weighted_bce. Zero where p sits outside the clamp interval.
Tensor weighted_bce_grad(const Tensor& p, const Tensor& y, const Tensor& w);

/// dL/dz for p = sigmoid(z): w * (p - y) / N, zero where p is clamped.
Tensor weighted_bce_logit_grad(const Tensor& p, const Tensor& y, const Tensor& w);

}  // namespace rethink

#endif  // RETHINK_LOSS_HPP_
