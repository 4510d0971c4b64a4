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

#include "rethink/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "rethink/dropout.hpp"
#include "rethink/error.hpp"
#include "rethink/loss.hpp"
#include "rethink/parallel.hpp"

namespace rethink {

namespace {

Matrix sigmoid(const Matrix& a) { return (1.0 / (1.0 + (-a.array()).exp())).matrix(); }

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

Tensor labels_to_tensor(std::span<const LabelVector> labels, std::size_t k) {
  Tensor y(labels.size(), k);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n].size() != k) {
      throw DimensionError("label vector " + std::to_string(n) + " has length " +
                           std::to_string(labels[n].size()) + ", expected " + std::to_string(k));
    }
    for (std::size_t i = 0; i < k; ++i) y(n, i) = labels[n][i] ? 1.0 : 0.0;
  }
  return y;
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  Matrix out(idx(rows.size()), x.mat().cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(idx(i)) = x.mat().row(idx(rows[i]));
  return Tensor(std::move(out));
}

}  // namespace

void ModelConfig::validate() const {
  if (hidden_dim < 1) throw ParameterError("hidden_dim must be >= 1");
  if (rethink_iterations < 1) throw ParameterError("rethink_iterations must be >= 1");
  if (!(recurrent_dropout >= 0.0 && recurrent_dropout < 1.0)) {
    throw ParameterError("recurrent_dropout must lie in [0, 1)");
  }
  if (!(l2_strength >= 0.0) || !std::isfinite(l2_strength)) throw ParameterError("l2_strength must be >= 0");
  if (!(optimizer.learning_rate > 0.0)) throw ParameterError("learning rate must be > 0");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0) || !(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) {
    throw ParameterError("optimizer betas must lie in [0, 1)");
  }
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (max_epochs < 1) throw ParameterError("max_epochs must be >= 1");
  if (!(min_delta >= 0.0)) throw ParameterError("min_delta must be >= 0");
}

TrainHistory run_minibatch_training(std::size_t n_examples, const TrainConfig& config, std::mt19937_64& rng,
                                    const std::function<double(std::span<const std::size_t>)>& step) {
  config.validate();
  if (n_examples == 0) throw SizeError("cannot train on an empty dataset");
  TrainHistory history;
  std::vector<std::size_t> order(n_examples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t batch = 0;
    for (std::size_t start = 0; start < n_examples; start += config.batch_size, ++batch) {
      const std::size_t len = std::min(config.batch_size, n_examples - start);
      const double loss = step(std::span<const std::size_t>(order).subspan(start, len));
      if (!std::isfinite(loss)) throw DivergenceError(epoch, batch + 1);
      history.batch_loss.push_back(loss);
      total += loss * static_cast<double>(len);
    }
    const double epoch_loss = total / static_cast<double>(n_examples);
    history.epoch_loss.push_back(epoch_loss);
    const bool improved = std::isinf(best) || (best - epoch_loss) > config.min_delta * std::abs(best);
    if (improved) {
      best = epoch_loss;
      stale = 0;
    } else if (++stale >= config.patience) {
      history.converged = true;
      break;
    }
  }
  return history;
}

// ---------------------------------------------------------------------------

RethinkNet::RethinkNet(ModelConfig config, std::size_t input_dim, std::size_t n_labels)
    : config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
  if (input_dim < 1 || n_labels < 1) throw DimensionError("model needs d >= 1 and K >= 1");
  cell_ = CellParams::initialize(config_.cell, input_dim, config_.hidden_dim, rng_);
  if (config_.identity_dense) {
    if (config_.hidden_dim != n_labels) throw ConfigurationError("identity dense layer needs hidden_dim == K");
    dense_ = Tensor::identity(n_labels);
  } else {
    dense_ = init::glorot_uniform(config_.hidden_dim, n_labels, rng_);
  }
  dense_bias_ = Tensor(1, n_labels);
  optimizer_ = OptimizerState::for_params(std::as_const(*this).parameters(), config_.optimizer);
}

std::vector<Tensor*> RethinkNet::parameters() {
  return {&cell_.input, &cell_.recurrent, &cell_.bias, &dense_, &dense_bias_};
}

std::vector<const Tensor*> RethinkNet::parameters() const {
  return {&cell_.input, &cell_.recurrent, &cell_.bias, &dense_, &dense_bias_};
}

std::vector<std::string> RethinkNet::parameter_names() {
  return {"cell.input", "cell.recurrent", "cell.bias", "dense", "dense.bias"};
}

std::vector<bool> RethinkNet::regularized() { return {true, true, false, true, false}; }

std::vector<bool> RethinkNet::trainable() const {
  return {true, true, true, !config_.identity_dense, !config_.identity_dense};
}

std::size_t RethinkNet::parameter_count() const {
  const auto params = parameters();
  const auto train = trainable();
  std::size_t n = 0;
  for (std::size_t i = 0; i < params.size(); ++i) n += train[i] ? params[i]->size() : 0;
  return n;
}

std::vector<Tensor> RethinkNet::forward(const Tensor& x, bool training) {
  if (training && config_.recurrent_dropout > 0.0) {
    const Tensor mask = recurrent_dropout_mask(cell_.recurrent.rows(), cell_.recurrent.cols(),
                                               config_.recurrent_dropout, rng_);
    return forward(x, &mask, nullptr);
  }
  return forward(x, nullptr, nullptr);
}

std::vector<Tensor> RethinkNet::forward(const Tensor& x, const Tensor* mask, ForwardTape* tape) const {
  if (x.cols() != input_dim()) {
    throw DimensionError("input has " + std::to_string(x.cols()) + " features, model expects " +
                         std::to_string(input_dim()));
  }
  Tensor recurrent = cell_.recurrent;
  if (mask) {
    require_same_shape(*mask, cell_.recurrent, "dropout mask");
    recurrent.mat().array() *= mask->mat().array();
  }
  const std::size_t b = iterations();
  std::vector<Tensor> probs;
  probs.reserve(b);
  CellState state = CellState::zeros(cell_.kind, x.rows(), cell_.hidden_dim);
  if (tape) {
    *tape = ForwardTape{};
    tape->x = x;
    tape->mask = mask ? *mask : Tensor{};
    tape->states.push_back(state);
  }
  for (std::size_t t = 0; t < b; ++t) {
    StepCache cache;
    state = cell_forward(cell_, recurrent, x, state, tape ? &cache : nullptr);
    Matrix logits = state.h.mat() * dense_.mat();
    logits.rowwise() += dense_bias_.mat().row(0);
    probs.emplace_back(sigmoid(logits));
    if (tape) {
      tape->states.push_back(state);
      tape->caches.push_back(std::move(cache));
    }
  }
  if (tape) {
    tape->recurrent = std::move(recurrent);
    tape->probs = probs;
    tape->complete = true;
  }
  return probs;
}

std::vector<LabelVector> binarize(const Tensor& probs) {
  std::vector<LabelVector> out;
  out.reserve(probs.rows());
  for (std::size_t n = 0; n < probs.rows(); ++n) {
    LabelVector v(probs.cols());
    for (std::size_t i = 0; i < probs.cols(); ++i) v.set(i, probs(n, i) >= kDecisionThreshold);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<LabelVector> RethinkNet::predict(const Tensor& x) const {
  return binarize(forward(x, nullptr, nullptr).back());
}

std::vector<std::vector<LabelVector>> RethinkNet::predict_iterations(const Tensor& x) const {
  std::vector<std::vector<LabelVector>> out;
  for (const Tensor& p : forward(x, nullptr, nullptr)) out.push_back(binarize(p));
  return out;
}

std::vector<Tensor> RethinkNet::importance_weights(const std::vector<Tensor>& probs,
                                                   std::span<const LabelVector> labels) const {
  const std::size_t k = n_labels();
  std::vector<Tensor> weights;
  weights.reserve(probs.size());
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const std::size_t n_rows = probs[t].rows();
    if (labels.size() != n_rows) {
      throw DimensionError("got " + std::to_string(labels.size()) + " label vectors for " +
                           std::to_string(n_rows) + " rows");
    }
    Tensor w(n_rows, k, 1.0);
    if (t > 0 && config_.reweighted) {
      const Tensor& prev = probs[t - 1];
      LabelVector guess(k);
      for (std::size_t n = 0; n < n_rows; ++n) {
        if (labels[n].size() != k) throw DimensionError("label vector length differs from K");
        for (std::size_t i = 0; i < k; ++i) guess.set(i, prev(n, i) >= kDecisionThreshold);
        std::span<double> row = w.values().subspan(n * k, k);
        raw_cost_differences(labels[n], guess, config_.cost, row);
        normalize_weights(row, config_.weight_normalization);
      }
    }
    weights.push_back(std::move(w));
  }
  return weights;
}

LossBreakdown RethinkNet::training_loss(const Tensor& x, std::span<const LabelVector> labels, const Tensor* mask,
                                        const std::vector<Tensor>* fixed_weights) const {
  const Tensor y = labels_to_tensor(labels, n_labels());
  const std::vector<Tensor> probs = forward(x, mask, nullptr);
  LossBreakdown out;
  out.weights = fixed_weights ? *fixed_weights : importance_weights(probs, labels);
  if (out.weights.size() != probs.size()) throw DimensionError("need one weight tensor per iteration");
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const double term = weighted_bce(probs[t], y, out.weights[t]);
    out.per_iteration.push_back(term);
    out.total += term;
  }
  const auto params = parameters();
  const auto reg = regularized();
  const auto train = trainable();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (reg[i] && train[i]) out.l2 += params[i]->mat().squaredNorm();
  }
  out.l2 *= config_.l2_strength;
  out.total += out.l2;
  return out;
}

std::vector<Tensor> RethinkNet::backward(const ForwardTape& tape, const Tensor& y,
                                         const std::vector<Tensor>& weights) const {
  if (!tape.complete) throw StateError("backward called without a recorded forward pass");
  const std::size_t b = iterations();
  if (tape.probs.size() != b || weights.size() != b) throw DimensionError("tape does not match iteration count");
  require_shape(y, tape.x.rows(), n_labels(), "label matrix");

  CellGrads cell_grads = CellGrads::zeros_like(cell_);
  Tensor d_dense(dense_.rows(), dense_.cols());
  Tensor d_bias(1, n_labels());
  CellState d_state;
  d_state.h = Tensor(tape.x.rows(), cell_.hidden_dim);
  for (std::size_t t = b; t-- > 0;) {
    const Tensor dz = weighted_bce_logit_grad(tape.probs[t], y, weights[t]);
    const CellState& out = tape.states[t + 1];
    d_dense.mat().noalias() += out.h.mat().transpose() * dz.mat();
    d_bias.mat() += dz.mat().colwise().sum();
    d_state.h.mat().noalias() += dz.mat() * dense_.mat().transpose();
    d_state = cell_backward(cell_, tape.recurrent, tape.x, tape.states[t], out, tape.caches[t], d_state, cell_grads);
  }
  if (!tape.mask.empty()) cell_grads.recurrent.mat().array() *= tape.mask.mat().array();

  std::vector<Tensor> grads;
  grads.reserve(5);
  grads.push_back(std::move(cell_grads.input));
  grads.push_back(std::move(cell_grads.recurrent));
  grads.push_back(std::move(cell_grads.bias));
  grads.push_back(std::move(d_dense));
  grads.push_back(std::move(d_bias));
  const auto params = parameters();
  const auto reg = regularized();
  const auto train = trainable();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!train[i]) {
      grads[i].fill(0.0);
    } else if (reg[i] && config_.l2_strength > 0.0) {
      grads[i].mat() += (2.0 * config_.l2_strength) * params[i]->mat();
    }
  }
  return grads;
}

double RethinkNet::train_batch(const Tensor& x, std::span<const LabelVector> labels) {
  const Tensor y = labels_to_tensor(labels, n_labels());
  Tensor mask;
  if (config_.recurrent_dropout > 0.0) {
    mask = recurrent_dropout_mask(cell_.recurrent.rows(), cell_.recurrent.cols(), config_.recurrent_dropout, rng_);
  }
  ForwardTape tape;
  forward(x, mask.empty() ? nullptr : &mask, &tape);
  const std::vector<Tensor> weights = importance_weights(tape.probs, labels);
  double loss = 0.0;
  for (std::size_t t = 0; t < tape.probs.size(); ++t) loss += weighted_bce(tape.probs[t], y, weights[t]);
  if (config_.l2_strength > 0.0) {
    const auto params = parameters();
    const auto reg = regularized();
    const auto train = trainable();
    double sq = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (reg[i] && train[i]) sq += params[i]->mat().squaredNorm();
    }
    loss += config_.l2_strength * sq;
  }
  if (!std::isfinite(loss)) return loss;
  const std::vector<Tensor> grads = backward(tape, y, weights);
  nadam_step(parameters(), grads, optimizer_);
  return loss;
}

TrainHistory RethinkNet::fit(const Dataset& train, const TrainConfig& config) {
  train.validate();
  if (train.n_features() != input_dim() || train.n_labels() != n_labels()) {
    throw DimensionError("dataset shape (d=" + std::to_string(train.n_features()) + ", K=" +
                         std::to_string(train.n_labels()) + ") does not match the model");
  }
  std::vector<LabelVector> batch_labels;
  TrainHistory h = run_minibatch_training(train.n_examples(), config, rng_, [&](std::span<const std::size_t> rows) {
    batch_labels.clear();
    for (std::size_t r : rows) batch_labels.push_back(train.labels[r]);
    return train_batch(gather_rows(train.features, rows), batch_labels);
  });
  history_.insert(history_.end(), h.epoch_loss.begin(), h.epoch_loss.end());
  return h;
}

double mean_cost(CostFunction cost, std::span<const LabelVector> truth, std::span<const LabelVector> pred) {
  if (truth.size() != pred.size()) throw DimensionError("truth and prediction counts differ");
  if (truth.empty()) throw SizeError("mean cost of an empty set");
  double sum = 0.0;
  for (std::size_t n = 0; n < truth.size(); ++n) sum += cost(truth[n], pred[n]);
  return sum / static_cast<double>(truth.size());
}

EvalResult RethinkNet::evaluate(const Dataset& test, CostFunction cost) const {
  if (test.n_labels() != n_labels()) {
    throw DimensionError("dataset has K=" + std::to_string(test.n_labels()) + ", model has K=" +
                         std::to_string(n_labels()));
  }
  EvalResult r;
  for (const auto& pred : predict_iterations(test.features)) r.per_iteration.push_back(mean_cost(cost, test.labels, pred));
  r.final = r.per_iteration.back();
  return r;
}

std::vector<EvalResult> RethinkNet::evaluate_all(const Dataset& test) const {
  if (test.n_labels() != n_labels()) {
    throw DimensionError("dataset has K=" + std::to_string(test.n_labels()) + ", model has K=" +
                         std::to_string(n_labels()));
  }
  const auto preds = predict_iterations(test.features);
  std::vector<EvalResult> out;
  for (CostFunction cost : CostFunction::all()) {
    EvalResult r;
    for (const auto& pred : preds) r.per_iteration.push_back(mean_cost(cost, test.labels, pred));
    r.final = r.per_iteration.back();
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> default_l2_grid() { return {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}; }

L2Selection select_l2(const Dataset& ds, const ModelConfig& base, const TrainConfig& train,
                      const std::vector<double>& grid, std::size_t folds, CostFunction cost, std::size_t threads) {
  if (grid.empty()) throw ParameterError("empty l2 grid");
  L2Selection sel;
  sel.grid = grid;
  if (grid.size() == 1) {
    sel.best = grid.front();
    return sel;
  }
  const auto parts = kfold(ds.n_examples(), folds, base.seed);
  std::vector<double> scores(grid.size() * folds);
  parallel_for(scores.size(), threads, [&](std::size_t job) {
    const std::size_t g = job / folds;
    const std::size_t f = job % folds;
    std::vector<std::size_t> fit_rows;
    for (std::size_t o = 0; o < folds; ++o) {
      if (o != f) fit_rows.insert(fit_rows.end(), parts[o].begin(), parts[o].end());
    }
    std::sort(fit_rows.begin(), fit_rows.end());
    ModelConfig cfg = base;
    cfg.l2_strength = grid[g];
    RethinkNet model(cfg, ds.n_features(), ds.n_labels());
    model.fit(ds.subset(fit_rows), train);
    scores[job] = model.evaluate(ds.subset(parts[f]), cost).final;
  });
  sel.training_runs = scores.size();
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) sum += scores[g * folds + f];
    sel.mean_validation.push_back(sum / static_cast<double>(folds));
  }
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double m = sel.mean_validation[g];
    const double b = sel.mean_validation[best];
    if (cost.better(m, b) || (m == b && grid[g] > grid[best])) best = g;
  }
  sel.best = grid[best];
  return sel;
}

// ---------------------------------------------------------------------------

MemoryMatrix normalize_memory_matrix(const Tensor& w) {
  if (w.rows() != w.cols()) throw DimensionError("memory matrix must be square");
  MemoryMatrix out{w, std::vector<bool>(w.rows(), false)};
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double d = w(i, i);
    if (std::abs(d) < 1e-8) {
      out.unnormalized[i] = true;
      continue;
    }
    out.matrix.mat().row(idx(i)) /= d;
  }
  return out;
}

MemoryMatrix extract_memory_matrix(const RethinkNet& model) {
  if (model.cell().kind != CellKind::SRN) {
    throw ConfigurationError("memory matrix needs an SRN cell, model uses " + to_string(model.cell().kind));
  }
  if (model.config().hidden_dim != model.n_labels()) {
    throw ConfigurationError("memory matrix needs hidden_dim == K (" + std::to_string(model.config().hidden_dim) +
                             " != " + std::to_string(model.n_labels()) + ")");
  }
  return normalize_memory_matrix(Tensor(Matrix(model.cell().recurrent.mat().transpose())));
}

}  // namespace rethink
