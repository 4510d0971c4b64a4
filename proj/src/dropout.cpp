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

#include "rethink/dropout.hpp"

#include <string>

#include "rethink/error.hpp"

namespace rethink {

Tensor recurrent_dropout_mask(std::size_t rows, std::size_t cols, double rate, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ParameterError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  Tensor mask(rows, cols, 1.0);
  if (rate == 0.0) return mask;
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : mask.values()) v = u(rng) < keep ? scale : 0.0;
  return mask;
}

}  // namespace rethink
