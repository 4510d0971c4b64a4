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

#include "rethink/nadam.hpp"

#include <cmath>
#include <string>

#include "rethink/error.hpp"

namespace rethink {

OptimizerState OptimizerState::for_params(std::span<const Tensor* const> params, NadamConfig config) {
  OptimizerState s;
  s.config = config;
  for (const Tensor* p : params) {
    s.first_moment.emplace_back(p->rows(), p->cols());
    s.second_moment.emplace_back(p->rows(), p->cols());
  }
  return s;
}

void nadam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, OptimizerState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw DimensionError("nadam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " +
                         std::to_string(state.first_moment.size()) + " moment slots");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require_same_shape(*params[i], grads[i], "nadam gradient");
    require_same_shape(*params[i], state.first_moment[i], "nadam moment");
    require_same_shape(*params[i], state.second_moment[i], "nadam moment");
  }

  const NadamConfig& c = state.config;
  const double t = static_cast<double>(state.step + 1);
  const double b1t = std::pow(c.beta1, t);
  const double b1t_next = b1t * c.beta1;
  const double v_corr = 1.0 - std::pow(c.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->values();
    const auto g = grads[i].values();
    auto m = state.first_moment[i].values();
    auto v = state.second_moment[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double v_hat = v[j] / v_corr;
      const double direction = c.nesterov
                                   ? c.beta1 * m[j] / (1.0 - b1t_next) + (1.0 - c.beta1) * g[j] / (1.0 - b1t)
                                   : m[j] / (1.0 - b1t);
      p[j] -= c.learning_rate * direction / (std::sqrt(v_hat) + c.epsilon);
    }
  }
  ++state.step;
}

}  // namespace rethink
