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

#include "rethink/cells.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "rethink/error.hpp"

namespace rethink {

namespace {

using Array = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix sigmoid(const Matrix& a) { return (1.0 / (1.0 + (-a.array()).exp())).matrix(); }

// X U^T + b broadcast over rows.
Matrix affine(const Matrix& x, const Matrix& u, const Matrix& b) {
  Matrix out = x * u.transpose();
  out.rowwise() += b.row(0);
  return out;
}

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

void check_inputs(const CellParams& p, const Tensor& recurrent, const Tensor& x, const CellState& prev) {
  require_shape(recurrent, p.recurrent.rows(), p.recurrent.cols(), "recurrent matrix");
  if (x.cols() != p.input_dim) {
    throw DimensionError("cell input has " + std::to_string(x.cols()) + " columns, expected " +
                         std::to_string(p.input_dim));
  }
  require_shape(prev.h, x.rows(), p.hidden_dim, "previous hidden state");
  if (p.kind == CellKind::LSTM) require_shape(prev.c, x.rows(), p.hidden_dim, "previous cell state");
}

}  // namespace

std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::SRN: return "srn";
    case CellKind::GRU: return "gru";
    case CellKind::LSTM: return "lstm";
    case CellKind::IRNN: return "irnn";
  }
  return "?";
}

CellKind parse_cell_kind(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "srn") return CellKind::SRN;
  if (s == "gru") return CellKind::GRU;
  if (s == "lstm") return CellKind::LSTM;
  if (s == "irnn") return CellKind::IRNN;
  throw ParameterError("unknown cell kind '" + std::string(name) + "'");
}

std::size_t gate_count(CellKind kind) noexcept {
  switch (kind) {
    case CellKind::GRU: return 3;
    case CellKind::LSTM: return 4;
    default: return 1;
  }
}

CellParams CellParams::zeros(CellKind kind, std::size_t input_dim, std::size_t hidden_dim) {
  if (input_dim == 0 || hidden_dim == 0) throw DimensionError("cell dimensions must be positive");
  const std::size_t g = gate_count(kind) * hidden_dim;
  CellParams p;
  p.kind = kind;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.input = Tensor(g, input_dim);
  p.recurrent = Tensor(g, hidden_dim);
  p.bias = Tensor(1, g);
  return p;
}

CellParams CellParams::initialize(CellKind kind, std::size_t input_dim, std::size_t hidden_dim,
                                  std::mt19937_64& rng) {
  CellParams p = zeros(kind, input_dim, hidden_dim);
  const std::size_t gates = gate_count(kind);
  const auto h = idx(hidden_dim);
  for (std::size_t g = 0; g < gates; ++g) {
    const auto rows = Eigen::seqN(idx(g) * h, h);
    p.input.mat()(rows, Eigen::all) = init::glorot_uniform(hidden_dim, input_dim, rng).mat();
    p.recurrent.mat()(rows, Eigen::all) =
        kind == CellKind::IRNN ? Matrix::Identity(h, h) : init::orthogonal(hidden_dim, rng).mat();
  }
  if (kind == CellKind::LSTM) p.bias.mat().middleCols(h, h).setOnes();
  return p;
}

void CellParams::validate() const {
  const std::size_t g = gate_count(kind) * hidden_dim;
  require_shape(input, g, input_dim, "cell input matrix");
  require_shape(recurrent, g, hidden_dim, "cell recurrent matrix");
  require_shape(bias, 1, g, "cell bias");
}

CellState CellState::zeros(CellKind kind, std::size_t rows, std::size_t hidden_dim) {
  CellState s;
  s.h = Tensor(rows, hidden_dim);
  if (kind == CellKind::LSTM) s.c = Tensor(rows, hidden_dim);
  return s;
}

CellGrads CellGrads::zeros_like(const CellParams& p) {
  return {Tensor(p.input.rows(), p.input.cols()), Tensor(p.recurrent.rows(), p.recurrent.cols()),
          Tensor(p.bias.rows(), p.bias.cols())};
}

CellState cell_forward(const CellParams& p, const Tensor& recurrent, const Tensor& x,
                       const CellState& prev, StepCache* cache) {
  check_inputs(p, recurrent, x, prev);
  const auto h = idx(p.hidden_dim);
  const Matrix& H = prev.h.mat();
  const Matrix& W = recurrent.mat();
  CellState out;

  switch (p.kind) {
    case CellKind::SRN:
    case CellKind::IRNN: {
      Matrix a = affine(x.mat(), p.input.mat(), p.bias.mat());
      a.noalias() += H * W.transpose();
      Matrix o = p.kind == CellKind::SRN ? sigmoid(a) : Matrix(a.cwiseMax(0.0));
      if (cache) {
        cache->pre = std::move(a);
        cache->gates = o;
      }
      out.h = Tensor(std::move(o));
      break;
    }
    case CellKind::GRU: {
      Matrix a = affine(x.mat(), p.input.mat(), p.bias.mat());
      a.leftCols(2 * h).noalias() += H * W.topRows(2 * h).transpose();
      Matrix zr = sigmoid(a.leftCols(2 * h));
      Matrix rh = (zr.rightCols(h).array() * H.array()).matrix();
      Matrix an = a.rightCols(h);
      an.noalias() += rh * W.bottomRows(h).transpose();
      Matrix n = an.array().tanh().matrix();
      const auto z = zr.leftCols(h).array();
      Matrix hn = ((1.0 - z) * n.array() + z * H.array()).matrix();
      if (cache) {
        cache->gates.resize(x.mat().rows(), 3 * h);
        cache->gates << zr, n;
        cache->reset_h = std::move(rh);
      }
      out.h = Tensor(std::move(hn));
      break;
    }
    case CellKind::LSTM: {
      Matrix a = affine(x.mat(), p.input.mat(), p.bias.mat());
      a.noalias() += H * W.transpose();
      Matrix gates(a.rows(), a.cols());
      gates.leftCols(2 * h) = sigmoid(a.leftCols(2 * h));
      gates.middleCols(2 * h, h) = a.middleCols(2 * h, h).array().tanh().matrix();
      gates.rightCols(h) = sigmoid(a.rightCols(h));
      const auto i = gates.leftCols(h).array();
      const auto f = gates.middleCols(h, h).array();
      const auto g = gates.middleCols(2 * h, h).array();
      const auto o = gates.rightCols(h).array();
      Matrix c = (f * prev.c.mat().array() + i * g).matrix();
      Matrix tc = c.array().tanh().matrix();
      Matrix hn = (o * tc.array()).matrix();
      if (cache) {
        cache->gates = std::move(gates);
        cache->cell_tanh = std::move(tc);
      }
      out.h = Tensor(std::move(hn));
      out.c = Tensor(std::move(c));
      break;
    }
  }
  return out;
}

CellState cell_backward(const CellParams& p, const Tensor& recurrent, const Tensor& x,
                        const CellState& prev, const CellState& out, const StepCache& cache,
                        const CellState& d_out, CellGrads& grads) {
  const auto h = idx(p.hidden_dim);
  const Matrix& X = x.mat();
  const Matrix& H = prev.h.mat();
  const Matrix& W = recurrent.mat();
  const Matrix& dh = d_out.h.mat();
  CellState d_prev;
  Matrix da;  // gradient w.r.t. gate pre-activations, N x G*h

  switch (p.kind) {
    case CellKind::SRN:
    case CellKind::IRNN: {
      if (p.kind == CellKind::SRN) {
        const auto o = out.h.mat().array();
        da = (dh.array() * o * (1.0 - o)).matrix();
      } else {
        da = (dh.array() * (cache.pre.array() > 0.0).cast<double>()).matrix();
      }
      grads.recurrent.mat().noalias() += da.transpose() * H;
      d_prev.h = Tensor(da * W);
      break;
    }
    case CellKind::GRU: {
      const auto z = cache.gates.leftCols(h).array();
      const auto r = cache.gates.middleCols(h, h).array();
      const auto n = cache.gates.rightCols(h).array();
      da.resize(X.rows(), 3 * h);
      const Matrix dn = (dh.array() * (1.0 - z)).matrix();
      da.rightCols(h) = (dn.array() * (1.0 - n * n)).matrix();
      const Matrix d_rh = da.rightCols(h) * W.bottomRows(h);
      da.leftCols(h) = (dh.array() * (H.array() - n) * z * (1.0 - z)).matrix();
      da.middleCols(h, h) = (d_rh.array() * H.array() * r * (1.0 - r)).matrix();
      grads.recurrent.mat().topRows(2 * h).noalias() += da.leftCols(2 * h).transpose() * H;
      grads.recurrent.mat().bottomRows(h).noalias() += da.rightCols(h).transpose() * cache.reset_h;
      Matrix dH = (dh.array() * z + d_rh.array() * r).matrix();
      dH.noalias() += da.leftCols(2 * h) * W.topRows(2 * h);
      d_prev.h = Tensor(std::move(dH));
      break;
    }
    case CellKind::LSTM: {
      const auto i = cache.gates.leftCols(h).array();
      const auto f = cache.gates.middleCols(h, h).array();
      const auto g = cache.gates.middleCols(2 * h, h).array();
      const auto o = cache.gates.rightCols(h).array();
      const auto tc = cache.cell_tanh.array();
      Matrix dc = (dh.array() * o * (1.0 - tc * tc)).matrix();
      if (!d_out.c.empty()) dc += d_out.c.mat();
      da.resize(X.rows(), 4 * h);
      da.leftCols(h) = (dc.array() * g * i * (1.0 - i)).matrix();
      da.middleCols(h, h) = (dc.array() * prev.c.mat().array() * f * (1.0 - f)).matrix();
      da.middleCols(2 * h, h) = (dc.array() * i * (1.0 - g * g)).matrix();
      da.rightCols(h) = (dh.array() * tc * o * (1.0 - o)).matrix();
      grads.recurrent.mat().noalias() += da.transpose() * H;
      d_prev.h = Tensor(da * W);
      d_prev.c = Tensor((dc.array() * f).matrix());
      break;
    }
  }
  grads.input.mat().noalias() += da.transpose() * X;
  grads.bias.mat() += da.colwise().sum();
  return d_prev;
}

Tensor srn_step(const Tensor& x, const Tensor& o_prev, const CellParams& params) {
  if (params.kind != CellKind::SRN) throw ParameterError("srn_step needs SRN parameters");
  return cell_forward(params, params.recurrent, x, CellState{o_prev, {}}).h;
}

Tensor irnn_step(const Tensor& x, const Tensor& o_prev, const CellParams& params) {
  if (params.kind != CellKind::IRNN) throw ParameterError("irnn_step needs IRNN parameters");
  return cell_forward(params, params.recurrent, x, CellState{o_prev, {}}).h;
}

Tensor gru_step(const Tensor& x, const Tensor& h_prev, const CellParams& params) {
  if (params.kind != CellKind::GRU) throw ParameterError("gru_step needs GRU parameters");
  return cell_forward(params, params.recurrent, x, CellState{h_prev, {}}).h;
}

CellState lstm_step(const Tensor& x, const CellState& prev, const CellParams& params) {
  if (params.kind != CellKind::LSTM) throw ParameterError("lstm_step needs LSTM parameters");
  return cell_forward(params, params.recurrent, x, prev);
}

namespace init {

Tensor glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(rows, cols);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

Tensor orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix a(idx(n), idx(n));
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = dist(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return Tensor(std::move(q));
}

}  // namespace init

}  // namespace rethink
