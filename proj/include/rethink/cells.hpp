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

#ifndef RETHINK_CELLS_HPP_
#define RETHINK_CELLS_HPP_

// Recurrent cells over a batch of rows.
//
// Every cell computes its gate pre-activations as
//   X * U^T + H_prev * W^T + b
// with U (G*h x d), W (G*h x h) and b (1 x G*h), G gate blocks stacked
// row-wise in U and W:
//
//   SRN   G=1  h' = sigmoid(a)
//   IRNN  G=1  h' = relu(a), W starts at the identity
//   GRU   G=3  [z r n]  z,r = sigmoid, n = tanh(x U_n + (r * h) W_n^T + b_n),
//              h' = (1 - z) * n + z * h
//   LSTM  G=4  [i f g o]  c' = f * c + i * g, h' = o * tanh(c')
//
// The recurrent matrix is passed separately from CellParams so callers can
// substitute a DropConnect-masked copy during training.

#include <cstddef>
#include <random>
#include <string>
#include <string_view>

#include "rethink/tensor.hpp"

namespace rethink {

enum class CellKind { SRN, GRU, LSTM, IRNN };

std::string to_string(CellKind kind);
CellKind parse_cell_kind(std::string_view name);
std::size_t gate_count(CellKind kind) noexcept;

struct CellParams {
  CellKind kind = CellKind::SRN;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Tensor input;      // U
  Tensor recurrent;  // W
  Tensor bias;       // b

  /// All-zero parameters of the right shapes.
  static CellParams zeros(CellKind kind, std::size_t input_dim, std::size_t hidden_dim);
  /// Glorot-uniform U, orthogonal W (identity for IRNN), zero bias with the
  /// LSTM forget-gate bias at 1.
  static CellParams initialize(CellKind kind, std::size_t input_dim, std::size_t hidden_dim,
                               std::mt19937_64& rng);

  std::size_t parameter_count() const noexcept { return input.size() + recurrent.size() + bias.size(); }
  /// Throws DimensionError when shapes disagree with kind and dims.
  void validate() const;
};

struct CellState {
  Tensor h;
  Tensor c;  // LSTM cell state; empty for other kinds

  static CellState zeros(CellKind kind, std::size_t rows, std::size_t hidden_dim);
};

/// Intermediates of one step, consumed by cell_backward.
struct StepCache {
  Matrix gates;      // post-activation gate values, N x G*h
  Matrix pre;        // SRN/IRNN pre-activation (needed for ReLU)
  Matrix reset_h;    // GRU r * h_prev
  Matrix cell_tanh;  // LSTM tanh(c')
};

struct CellGrads {
  Tensor input;
  Tensor recurrent;
  Tensor bias;

  static CellGrads zeros_like(const CellParams& p);
};

/// One step. `recurrent` is the W actually used (masked or not). Fills
/// `cache` when non-null.
CellState cell_forward(const CellParams& params, const Tensor& recurrent, const Tensor& x,
                       const CellState& prev, StepCache* cache = nullptr);

/// Backward through one step. `d_out` holds dL/dh' (and dL/dc' for LSTM,
/// may be empty). Accumulates into `grads` (grads.recurrent is w.r.t. the
/// W passed in) and returns dL/d(prev state).
CellState cell_backward(const CellParams& params, const Tensor& recurrent, const Tensor& x,
                        const CellState& prev, const CellState& out, const StepCache& cache,
                        const CellState& d_out, CellGrads& grads);

Tensor srn_step(const Tensor& x, const Tensor& o_prev, const CellParams& params);
Tensor irnn_step(const Tensor& x, const Tensor& o_prev, const CellParams& params);
Tensor gru_step(const Tensor& x, const Tensor& h_prev, const CellParams& params);
CellState lstm_step(const Tensor& x, const CellState& prev, const CellParams& params);

namespace init {
/// U(-l, l), l = sqrt(6 / (fan_in + fan_out)); fan_in = cols, fan_out = rows.
Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
/// Square orthogonal matrix from the QR decomposition of a Gaussian draw.
Tensor orthogonal(std::size_t n, std::mt19937_64& rng);
}  // namespace init

}  // namespace rethink

#endif  // RETHINK_CELLS_HPP_
