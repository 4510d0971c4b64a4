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

#include "rethink/loss.hpp"

#include <algorithm>
#include <cmath>

#include "rethink/error.hpp"

namespace rethink {

namespace {

void check(const Tensor& p, const Tensor& y, const Tensor& w) {
  require_same_shape(p, y, "weighted_bce labels");
  require_same_shape(p, w, "weighted_bce weights");
  if (p.rows() == 0) throw DimensionError("weighted_bce: empty batch");
}

bool clamped(double p) { return p < kProbClamp || p > 1.0 - kProbClamp; }

}  // namespace

double weighted_bce(const Tensor& p, const Tensor& y, const Tensor& w) {
  check(p, y, w);
  const auto pv = p.values();
  const auto yv = y.values();
  const auto wv = w.values();
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (wv[i] == 0.0) continue;
    const double q = std::clamp(pv[i], kProbClamp, 1.0 - kProbClamp);
    total -= wv[i] * (yv[i] * std::log(q) + (1.0 - yv[i]) * std::log(1.0 - q));
  }
  return total / static_cast<double>(p.rows());
}

Tensor weighted_bce_grad(const Tensor& p, const Tensor& y, const Tensor& w) {
  check(p, y, w);
  Tensor g(p.rows(), p.cols());
  const double inv_n = 1.0 / static_cast<double>(p.rows());
  const auto pv = p.values();
  const auto yv = y.values();
  const auto wv = w.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (clamped(pv[i])) continue;
    gv[i] = -wv[i] * (yv[i] / pv[i] - (1.0 - yv[i]) / (1.0 - pv[i])) * inv_n;
  }
  return g;
}

Tensor weighted_bce_logit_grad(const Tensor& p, const Tensor& y, const Tensor& w) {
  check(p, y, w);
  Tensor g(p.rows(), p.cols());
  const double inv_n = 1.0 / static_cast<double>(p.rows());
  const auto pv = p.values();
  const auto yv = y.values();
  const auto wv = w.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (clamped(pv[i])) continue;
    gv[i] = wv[i] * (pv[i] - yv[i]) * inv_n;
  }
  return g;
}

}  // namespace rethink
