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

#ifndef RETHINK_DROPOUT_HPP_
#define RETHINK_DROPOUT_HPP_

#include <cstddef>
#include <random>

#include "rethink/tensor.hpp"

namespace rethink {

/// DropConnect mask: each entry is 0 with probability `rate`, otherwise
/// 1 / (1 - rate). Multiply element-wise into a weight matrix at training
/// time; evaluation uses the unmasked weights. Throws ParameterError unless
/// 0 <= rate < 1.
Tensor recurrent_dropout_mask(std::size_t rows, std::size_t cols, double rate, std::mt19937_64& rng);

}  // namespace rethink

#endif  // RETHINK_DROPOUT_HPP_
