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

#ifndef RETHINK_MODEL_HPP_
#define RETHINK_MODEL_HPP_

// RethinkNet: one recurrent cell unrolled for B rethink iterations over the
// same feature vector, followed by a dense layer shared across iterations.
//
//   o(0) = 0
//   o(t) = cell(x, o(t-1))              t = 1..B
//   p(t) = sigmoid(o(t) V + c)          per-label probabilities
//
// The final prediction thresholds p(B) at 0.5. Training minimises
//   sum_t weighted_bce(p(t), Y, w(t)) + l2 * (|U|^2 + |W|^2 + |V|^2)
// where w(1) = 1 and, when reweighting is on, w(t) for t >= 2 are the
// cost-difference weights of the thresholded p(t-1) from the same pass.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rethink/cells.hpp"
#include "rethink/costs.hpp"
#include "rethink/data.hpp"
#include "rethink/nadam.hpp"
#include "rethink/tensor.hpp"

namespace rethink {

inline constexpr double kDecisionThreshold = 0.5;

struct ModelConfig {
  CellKind cell = CellKind::LSTM;
  std::size_t hidden_dim = 128;
  std::size_t rethink_iterations = 3;
  double recurrent_dropout = 0.25;
  double l2_strength = 0.0;
  CostFunction cost{CostKind::Hamming};
  bool reweighted = true;
  WeightNormalization weight_normalization = WeightNormalization::MeanOne;
  // Freeze the dense layer at the identity with zero bias (needs
  // hidden_dim == K), so the cell output is the label logit vector.
  bool identity_dense = false;
  std::uint64_t seed = 0;
  NadamConfig optimizer;

  void validate() const;
};

struct TrainConfig {
  std::size_t max_epochs = 1000;
  std::size_t batch_size = 256;
  // Stop after `patience` consecutive epochs whose relative improvement over
  // the best epoch loss is below `min_delta`.
  std::size_t patience = 10;
  double min_delta = 1e-4;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> epoch_loss;
  std::vector<double> batch_loss;
  bool converged = false;  // stopped by the patience rule
};

/// Shuffled mini-batch loop with the stopping rule above. `step` trains on
/// one batch of example indices and returns its mean loss. Throws
/// DivergenceError on a non-finite batch loss.
TrainHistory run_minibatch_training(std::size_t n_examples, const TrainConfig& config, std::mt19937_64& rng,
                                    const std::function<double(std::span<const std::size_t>)>& step);

/// Intermediates of a recorded forward pass.
struct ForwardTape {
  Tensor x;
  Tensor recurrent;              // W as used (masked in training)
  Tensor mask;                   // empty when no mask was applied
  std::vector<CellState> states; // states[0] initial, states[t] after iteration t
  std::vector<StepCache> caches;
  std::vector<Tensor> probs;
  bool complete = false;
};

struct LossBreakdown {
  double total = 0.0;
  std::vector<double> per_iteration;  // weighted BCE at each t
  double l2 = 0.0;
  std::vector<Tensor> weights;        // N x K per iteration
};

/// Mean criterion over examples at each iteration; `final` is t = B.
struct EvalResult {
  std::vector<double> per_iteration;
  double final = 0.0;
};

class RethinkNet {
 public:
  RethinkNet(ModelConfig config, std::size_t input_dim, std::size_t n_labels);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t input_dim() const noexcept { return cell_.input_dim; }
  std::size_t n_labels() const noexcept { return dense_.cols(); }
  std::size_t iterations() const noexcept { return config_.rethink_iterations; }

  const CellParams& cell() const noexcept { return cell_; }
  CellParams& cell() noexcept { return cell_; }
  const Tensor& dense() const noexcept { return dense_; }
  const Tensor& dense_bias() const noexcept { return dense_bias_; }

  /// [U, W, b, V, c]; the same objects are used at every iteration.
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  static std::vector<std::string> parameter_names();
  /// Which parameters carry the L2 penalty (matrices, not biases).
  static std::vector<bool> regularized();
  /// False for parameters held fixed by the configuration.
  std::vector<bool> trainable() const;
  /// Trainable scalars.
  std::size_t parameter_count() const;

  /// Probabilities p(1..B). With `training` a fresh DropConnect mask is
  /// drawn from the model's generator.
  std::vector<Tensor> forward(const Tensor& x, bool training);
  /// Deterministic pass with an explicit mask (nullptr = unmasked). Records
  /// intermediates into `tape` when non-null.
  std::vector<Tensor> forward(const Tensor& x, const Tensor* mask, ForwardTape* tape) const;

  std::vector<LabelVector> predict(const Tensor& x) const;
  /// Thresholded predictions at every iteration: result[t][n].
  std::vector<std::vector<LabelVector>> predict_iterations(const Tensor& x) const;

  /// Per-iteration weights for `probs` (all ones when reweighting is off).
  std::vector<Tensor> importance_weights(const std::vector<Tensor>& probs,
                                         std::span<const LabelVector> labels) const;

  /// Loss of one batch. `fixed_weights` overrides the computed weights.
  LossBreakdown training_loss(const Tensor& x, std::span<const LabelVector> labels, const Tensor* mask = nullptr,
                              const std::vector<Tensor>* fixed_weights = nullptr) const;

  /// Gradients of the total loss for a recorded pass, aligned with
  /// parameters(). Weights are constants. Throws StateError when the tape
  /// holds no completed forward pass.
  std::vector<Tensor> backward(const ForwardTape& tape, const Tensor& y, const std::vector<Tensor>& weights) const;

  /// One optimizer step on a batch; returns the batch loss.
  double train_batch(const Tensor& x, std::span<const LabelVector> labels);

  TrainHistory fit(const Dataset& train, const TrainConfig& config);

  EvalResult evaluate(const Dataset& test, CostFunction cost) const;
  /// One forward pass, all four criteria.
  std::vector<EvalResult> evaluate_all(const Dataset& test) const;

  const OptimizerState& optimizer() const noexcept { return optimizer_; }
  const std::vector<double>& history() const noexcept { return history_; }
  void set_history(std::vector<double> h) { history_ = std::move(h); }

 private:
  ModelConfig config_;
  CellParams cell_;
  Tensor dense_;       // hidden x K
  Tensor dense_bias_;  // 1 x K
  OptimizerState optimizer_;
  std::mt19937_64 rng_;
  std::vector<double> history_;
};

/// Thresholds probabilities at 0.5 (>= is relevant).
std::vector<LabelVector> binarize(const Tensor& probs);

/// Mean of `cost` over paired label vectors.
double mean_cost(CostFunction cost, std::span<const LabelVector> truth, std::span<const LabelVector> pred);

// ---------------------------------------------------------------------------
// L2 selection

std::vector<double> default_l2_grid();

struct L2Selection {
  double best = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_validation;  // per grid point (empty for a one-point grid)
  std::size_t training_runs = 0;
};

/// k-fold search over `grid` on the criterion `cost`. Ties go to the larger
/// value. Fold runs are distributed over `threads` workers.
L2Selection select_l2(const Dataset& ds, const ModelConfig& base, const TrainConfig& train,
                      const std::vector<double>& grid, std::size_t folds, CostFunction cost,
                      std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Memory matrix

struct MemoryMatrix {
  Tensor matrix;                  // K x K, row i = influence of label i's memory
  std::vector<bool> unnormalized; // rows left as-is because |diagonal| < 1e-8
};

/// Divides each row by its diagonal entry.
MemoryMatrix normalize_memory_matrix(const Tensor& w);

/// Recurrent matrix of an SRN with hidden_dim == K, oriented so entry
/// (i, j) multiplies o(t-1)[i] into unit j, then row-normalized. Throws
/// ConfigurationError for other cells or sizes.
MemoryMatrix extract_memory_matrix(const RethinkNet& model);

// ---------------------------------------------------------------------------
// Serialization

/// Model plus the feature scaling it was trained with.
struct ModelBundle {
  RethinkNet model;
  std::optional<ScalingParams> scaling;
};

/// Binary container: 8-byte magic, u64 header length, JSON header (config,
/// shapes, history, scaling), then little-endian doubles for each tensor.
void save_model(const std::filesystem::path& path, const RethinkNet& model,
                const std::optional<ScalingParams>& scaling = std::nullopt);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace rethink

#endif  // RETHINK_MODEL_HPP_
