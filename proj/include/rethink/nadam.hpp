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

#ifndef RETHINK_NADAM_HPP_
#define RETHINK_NADAM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "rethink/tensor.hpp"

namespace rethink {

struct NadamConfig {
  double learning_rate = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Without the look-ahead the update is plain Adam.
  bool nesterov = true;
};

struct OptimizerState {
  NadamConfig config;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;

  /// Zero moments shaped like `params`.
  static OptimizerState for_params(std::span<const Tensor* const> params, NadamConfig config = {});
};

/// One Nadam update at step t = state.step + 1:
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2,  v_hat = v / (1 - b2^t)
///   p -= lr * (b1 m / (1 - b1^(t+1)) + (1 - b1) g / (1 - b1^t)) / (sqrt(v_hat) + eps)
void nadam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, OptimizerState& state);

}  // namespace rethink

#endif  // RETHINK_NADAM_HPP_
