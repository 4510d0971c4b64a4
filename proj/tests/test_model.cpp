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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "reference_loss.hpp"
#include "rethink/dropout.hpp"
#include "rethink/error.hpp"
#include "rethink/gradient_check.hpp"
#include "rethink/loss.hpp"
#include "rethink/model.hpp"

namespace rethink {
namespace {

ModelConfig small_config(CellKind cell, std::size_t hidden, std::size_t b, std::uint64_t seed = 1) {
  ModelConfig c;
  c.cell = cell;
  c.hidden_dim = hidden;
  c.rethink_iterations = b;
  c.seed = seed;
  return c;
}

Tensor label_tensor(const std::vector<LabelVector>& labels) {
  Tensor y(labels.size(), labels.front().size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    for (std::size_t i = 0; i < labels[n].size(); ++i) y(n, i) = labels[n][i];
  }
  return y;
}

void zero_parameters(RethinkNet& m) {
  for (Tensor* p : m.parameters()) p->fill(0.0);
}

TEST(ModelConfig, Validation) {
  ModelConfig c;
  c.rethink_iterations = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = ModelConfig{};
  c.recurrent_dropout = 1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = ModelConfig{};
  c.hidden_dim = 0;
  EXPECT_THROW(RethinkNet(c, 3, 2), ParameterError);
  TrainConfig t;
  t.batch_size = 0;
  EXPECT_THROW(t.validate(), ParameterError);
}

TEST(Forward, SingleIterationIsCellPlusDense) {
  std::mt19937_64 rng(1);
  const Dataset ds = oracle::synthetic_dataset(5, 4, 3, 2);
  for (CellKind kind : {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::IRNN}) {
    const RethinkNet m(small_config(kind, 6, 1), 4, 3);
    const auto probs = m.forward(ds.features, nullptr, nullptr);
    ASSERT_EQ(probs.size(), 1u);
    const CellState h = cell_forward(m.cell(), m.cell().recurrent, ds.features, CellState::zeros(kind, 5, 6));
    Matrix logits = h.h.mat() * m.dense().mat();
    logits.rowwise() += m.dense_bias().mat().row(0);
    const Matrix want = (1.0 / (1.0 + (-logits.array()).exp())).matrix();
    EXPECT_LE((probs[0].mat() - want).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Forward, ProbabilitiesInRangeAndDeterministic) {
  const Dataset ds = oracle::synthetic_dataset(20, 5, 4, 3);
  RethinkNet m(small_config(CellKind::LSTM, 8, 3), 5, 4);
  const auto a = m.forward(ds.features, false);
  const auto b = m.forward(ds.features, false);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t t = 0; t < 3; ++t) {
    EXPECT_EQ(a[t], b[t]);
    EXPECT_GT(a[t].mat().minCoeff(), 0.0);
    EXPECT_LT(a[t].mat().maxCoeff(), 1.0);
  }
  EXPECT_THROW(m.forward(Tensor(2, 4), false), DimensionError);
}

TEST(Forward, TrainingModeUsesDropout) {
  const Dataset ds = oracle::synthetic_dataset(10, 3, 2, 4);
  RethinkNet m(small_config(CellKind::SRN, 6, 3), 3, 2);
  const auto eval = m.forward(ds.features, false);
  const auto train = m.forward(ds.features, true);
  EXPECT_EQ(eval[0], train[0]);  // t = 1 never reads the recurrent matrix
  EXPECT_FALSE(eval[2] == train[2]);
}

TEST(Predict, ThresholdAndFinalIteration) {
  const auto bits = binarize(Tensor::from_rows({{0.49, 0.5, 0.51}}));
  EXPECT_EQ(bits[0], (LabelVector{0, 1, 1}));

  const Dataset ds = oracle::synthetic_dataset(12, 4, 3, 5);
  const RethinkNet m(small_config(CellKind::GRU, 6, 3), 4, 3);
  EXPECT_EQ(m.predict(ds.features), binarize(m.forward(ds.features, nullptr, nullptr)[2]));
  EXPECT_EQ(m.predict(ds.features).front().size(), 3u);
}

TEST(Predict, ZeroModelPredictsAllOnes) {
  RethinkNet m(small_config(CellKind::SRN, 4, 3), 2, 3);
  zero_parameters(m);
  const Tensor x = Tensor::from_rows({{0.3, 0.9}, {0.0, 1.0}});
  const auto probs = m.forward(x, nullptr, nullptr);
  for (double p : probs.back().values()) EXPECT_EQ(p, 0.5);
  for (const auto& v : m.predict(x)) EXPECT_EQ(v, (LabelVector{1, 1, 1}));
}

TEST(TrainingLoss, UnweightedIsSumOfTermsPlusL2) {
  const Dataset ds = oracle::synthetic_dataset(8, 4, 3, 6);
  ModelConfig c = small_config(CellKind::LSTM, 5, 3);
  c.reweighted = false;
  c.l2_strength = 1e-3;
  const RethinkNet m(c, 4, 3);
  const LossBreakdown loss = m.training_loss(ds.features, ds.labels);
  const auto probs = m.forward(ds.features, nullptr, nullptr);
  const Tensor y = label_tensor(ds.labels);
  double want = 0.0;
  for (const Tensor& p : probs) want += weighted_bce(p, y, Tensor(8, 3, 1.0));
  const double l2 = 1e-3 * (m.cell().input.mat().squaredNorm() + m.cell().recurrent.mat().squaredNorm() +
                            m.dense().mat().squaredNorm());
  EXPECT_NEAR(loss.l2, l2, 1e-15);
  EXPECT_NEAR(loss.total, want + l2, 1e-12);
  ASSERT_EQ(loss.per_iteration.size(), 3u);
  for (const Tensor& w : loss.weights) EXPECT_EQ(w, Tensor(8, 3, 1.0));
}

TEST(TrainingLoss, ZeroL2IsPureWeightedBce) {
  const Dataset ds = oracle::synthetic_dataset(8, 4, 3, 7);
  ModelConfig c = small_config(CellKind::SRN, 5, 2);
  c.cost = CostFunction(CostKind::F1);
  const RethinkNet m(c, 4, 3);
  const LossBreakdown loss = m.training_loss(ds.features, ds.labels);
  EXPECT_EQ(loss.l2, 0.0);
  EXPECT_EQ(loss.total, loss.per_iteration[0] + loss.per_iteration[1]);
}

TEST(TrainingLoss, HammingReweightingIsIdentity) {
  const Dataset ds = oracle::synthetic_dataset(16, 4, 5, 8);
  for (CellKind kind : {CellKind::SRN, CellKind::LSTM}) {
    ModelConfig c = small_config(kind, 6, 3);
    c.l2_strength = 1e-4;
    c.reweighted = true;
    const RethinkNet a(c, 4, 5);
    c.reweighted = false;
    const RethinkNet b(c, 4, 5);
    const LossBreakdown la = a.training_loss(ds.features, ds.labels);
    const LossBreakdown lb = b.training_loss(ds.features, ds.labels);
    EXPECT_EQ(la.total, lb.total);
    EXPECT_EQ(la.per_iteration, lb.per_iteration);
  }
}

TEST(TrainingLoss, WeightsComeFromPreviousIteration) {
  const Dataset ds = oracle::synthetic_dataset(6, 3, 4, 9);
  ModelConfig c = small_config(CellKind::SRN, 5, 3);
  c.cost = CostFunction(CostKind::RankLoss);
  const RethinkNet m(c, 3, 4);
  const auto probs = m.forward(ds.features, nullptr, nullptr);
  const auto w = m.importance_weights(probs, ds.labels);
  EXPECT_EQ(w[0], Tensor(6, 4, 1.0));
  for (std::size_t t = 1; t < 3; ++t) {
    const auto prev = binarize(probs[t - 1]);
    for (std::size_t n = 0; n < 6; ++n) {
      const auto want = oracle::flip_oracle_weights(ds.labels[n], prev[n], c.cost);
      for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[t](n, i), want.values[i], 1e-12);
    }
  }
}

TEST(Backward, RequiresRecordedForward) {
  const RethinkNet m(small_config(CellKind::SRN, 3, 2), 2, 2);
  ForwardTape tape;
  EXPECT_THROW(m.backward(tape, Tensor(1, 2), {Tensor(1, 2, 1.0), Tensor(1, 2, 1.0)}), StateError);
}

TEST(Backward, ZeroWeightsGiveZeroGradients) {
  const Dataset ds = oracle::synthetic_dataset(4, 3, 2, 10);
  const RethinkNet m(small_config(CellKind::GRU, 4, 3), 3, 2);
  ForwardTape tape;
  m.forward(ds.features, nullptr, &tape);
  const std::vector<Tensor> w(3, Tensor(4, 2));
  for (const Tensor& g : m.backward(tape, label_tensor(ds.labels), w)) {
    EXPECT_EQ(g.mat().cwiseAbs().maxCoeff(), 0.0);
  }
}

// Full unrolled loss with weights and dropout mask held fixed.
GradCheckResult check_model_gradient(CellKind kind, std::size_t b, bool reweighted, std::mt19937_64& rng,
                                     std::size_t h, std::size_t d, std::size_t k, std::size_t n) {
  ModelConfig c = small_config(kind, h, b, rng());
  c.reweighted = reweighted;
  c.l2_strength = 1e-2;
  c.cost = CostFunction::all()[rng() % 4];
  RethinkNet m(c, d, k);
  {
    std::normal_distribution<double> g(0.0, 0.3);
    for (double& v : m.parameters()[2]->values()) v = g(rng);
    for (double& v : m.parameters()[4]->values()) v = g(rng);
  }
  const Dataset ds = oracle::synthetic_dataset(n, d, k, rng());
  const Tensor mask = recurrent_dropout_mask(m.cell().recurrent.rows(), h, 0.25, rng);
  ForwardTape tape;
  m.forward(ds.features, &mask, &tape);
  const std::vector<Tensor> weights = m.importance_weights(tape.probs, ds.labels);
  const auto grads = m.backward(tape, label_tensor(ds.labels), weights);
  const Tensor y = label_tensor(ds.labels);
  const long double base = oracle::reference_loss(m, ds.features, y, &mask, weights);
  EXPECT_NEAR(static_cast<double>(base), m.training_loss(ds.features, ds.labels, &mask, &weights).total, 1e-12);
  // Offsetting by the base value keeps the differences clear of double rounding.
  auto loss = [&] { return static_cast<double>(oracle::reference_loss(m, ds.features, y, &mask, weights) - base); };
  return gradient_check(loss, m.parameters(), grads);
}

TEST(Backward, MatchesFiniteDifferencesEveryCell) {
  std::mt19937_64 rng(11);
  for (CellKind kind : {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::IRNN}) {
    for (std::size_t b = 1; b <= 3; ++b) {
      for (bool reweighted : {false, true}) {
        for (int trial = 0; trial < 3; ++trial) {
          const auto r = check_model_gradient(kind, b, reweighted, rng, 5, 4, 3, 3);
          EXPECT_LT(r.max_relative_error, 1e-5)
              << to_string(kind) << " B=" << b << " reweighted=" << reweighted << " param " << r.worst_param
              << " analytic " << r.worst_analytic << " numeric " << r.worst_numeric;
        }
      }
    }
  }
}

TEST(Backward, SrnExampleConfiguration) {
  std::mt19937_64 rng(12);
  EXPECT_LT(check_model_gradient(CellKind::SRN, 3, true, rng, 5, 4, 3, 2).max_relative_error, 1e-5);
}

TEST(Model, ParameterCountIndependentOfIterations) {
  for (CellKind kind : {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::IRNN}) {
    const RethinkNet one(small_config(kind, 7, 1), 5, 3);
    const RethinkNet five(small_config(kind, 7, 5), 5, 3);
    EXPECT_EQ(one.parameter_count(), five.parameter_count());
    EXPECT_EQ(one.parameter_count(), gate_count(kind) * 7 * (5 + 7 + 1) + 7 * 3 + 3);
  }
}

TEST(Fit, SeparableToySet) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset ds;
  ds.features = Tensor(64, 2);
  for (std::size_t n = 0; n < 64; ++n) {
    const double a = u(rng);
    const double b = u(rng);
    ds.features(n, 0) = a;
    ds.features(n, 1) = b;
    ds.labels.push_back(LabelVector{a > 0 ? 1 : 0, b > 0 ? 1 : 0});
  }
  RethinkNet m(small_config(CellKind::LSTM, 16, 3), 2, 2);
  TrainConfig t;
  t.max_epochs = 200;
  const TrainHistory h = m.fit(ds, t);
  EXPECT_LE(h.epoch_loss.size(), 200u);
  EXPECT_EQ(m.history(), h.epoch_loss);
  EXPECT_LT(m.evaluate(ds, CostFunction(CostKind::Hamming)).final, 0.05);
}

TEST(Fit, PatienceStopsConstantLoss) {
  std::mt19937_64 rng(0);
  TrainConfig t;
  t.patience = 10;
  t.batch_size = 4;
  const TrainHistory h = run_minibatch_training(10, t, rng, [](std::span<const std::size_t>) { return 1.0; });
  EXPECT_TRUE(h.converged);
  EXPECT_EQ(h.epoch_loss.size(), 11u);
  EXPECT_EQ(h.batch_loss.size(), 33u);
}

TEST(Fit, SmallImprovementsCountAsStale) {
  std::mt19937_64 rng(0);
  TrainConfig t;
  t.patience = 3;
  t.batch_size = 100;
  double loss = 1.0;
  const TrainHistory h = run_minibatch_training(5, t, rng, [&](std::span<const std::size_t>) {
    loss *= 1.0 - 1e-5;
    return loss;
  });
  EXPECT_EQ(h.epoch_loss.size(), 4u);
}

TEST(Fit, NonFiniteLossReportsPosition) {
  std::mt19937_64 rng(0);
  TrainConfig t;
  t.batch_size = 2;
  int calls = 0;
  try {
    run_minibatch_training(6, t, rng, [&](std::span<const std::size_t>) {
      return ++calls == 5 ? std::nan("") : 1.0 / calls;
    });
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 2u);
    EXPECT_EQ(e.batch(), 2u);
  }
}

TEST(Fit, DivergingModelThrows) {
  const Dataset ds = oracle::synthetic_dataset(32, 3, 2, 14);
  RethinkNet m(small_config(CellKind::SRN, 4, 3), 3, 2);
  (*m.parameters()[4])(0, 1) = std::numeric_limits<double>::quiet_NaN();
  TrainConfig t;
  t.batch_size = 8;
  try {
    m.fit(ds, t);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1u);
    EXPECT_EQ(e.batch(), 1u);
  }
}

TEST(Fit, SameSeedSameParameters) {
  const Dataset ds = oracle::synthetic_dataset(50, 4, 3, 15);
  TrainConfig t;
  t.max_epochs = 5;
  t.batch_size = 16;
  RethinkNet a(small_config(CellKind::GRU, 6, 3, 7), 4, 3);
  RethinkNet b(small_config(CellKind::GRU, 6, 3, 7), 4, 3);
  a.fit(ds, t);
  b.fit(ds, t);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(*a.parameters()[i], *b.parameters()[i]);
  EXPECT_EQ(a.history(), b.history());
}

TEST(Evaluate, PerfectAndAllOnesPredictors) {
  Dataset ds = oracle::synthetic_dataset(20, 3, 4, 16);
  const RethinkNet m(small_config(CellKind::SRN, 5, 3), 3, 4);
  ds.labels = m.predict(ds.features);
  EXPECT_EQ(m.evaluate(ds, CostFunction(CostKind::Hamming)).final, 0.0);
  EXPECT_EQ(m.evaluate(ds, CostFunction(CostKind::F1)).final, 1.0);

  RethinkNet ones(small_config(CellKind::SRN, 3, 3), 2, 2);
  zero_parameters(ones);
  Dataset two;
  two.features = Tensor(2, 2);
  two.labels = {LabelVector{1, 0}, LabelVector{1, 1}};
  const EvalResult r = ones.evaluate(two, CostFunction(CostKind::Hamming));
  EXPECT_DOUBLE_EQ(r.final, 0.25);
  EXPECT_EQ(r.per_iteration.size(), 3u);

  Dataset wrong = two;
  wrong.labels = {LabelVector{1, 0, 0}, LabelVector{1, 1, 0}};
  EXPECT_THROW(ones.evaluate(wrong, CostFunction(CostKind::Hamming)), DimensionError);
}

TEST(Evaluate, ConsistentWithCostFunctions) {
  const Dataset ds = oracle::synthetic_dataset(30, 4, 5, 17);
  RethinkNet m(small_config(CellKind::LSTM, 6, 3), 4, 5);
  TrainConfig t;
  t.max_epochs = 3;
  m.fit(ds, t);
  const auto pred = m.predict(ds.features);
  const auto all = m.evaluate_all(ds);
  const auto costs = CostFunction::all();
  for (std::size_t c = 0; c < costs.size(); ++c) {
    double sum = 0.0;
    for (std::size_t n = 0; n < 30; ++n) sum += costs[c](ds.labels[n], pred[n]);
    EXPECT_NEAR(all[c].final, sum / 30.0, 1e-12);
    EXPECT_EQ(all[c].final, m.evaluate(ds, costs[c]).final);
  }
}

TEST(SelectL2, GridTimesFoldsRuns) {
  const Dataset ds = oracle::synthetic_dataset(30, 3, 3, 18);
  ModelConfig c = small_config(CellKind::SRN, 4, 2);
  TrainConfig t;
  t.max_epochs = 2;
  const L2Selection sel = select_l2(ds, c, t, default_l2_grid(), 3, CostFunction(CostKind::F1), 2);
  EXPECT_EQ(sel.training_runs, 24u);
  ASSERT_EQ(sel.mean_validation.size(), 8u);
  const auto best = std::max_element(sel.mean_validation.begin(), sel.mean_validation.end());
  EXPECT_EQ(*best, sel.mean_validation[std::find(sel.grid.begin(), sel.grid.end(), sel.best) - sel.grid.begin()]);

  const L2Selection rank = select_l2(ds, c, t, default_l2_grid(), 3, CostFunction(CostKind::RankLoss));
  const auto low = std::min_element(rank.mean_validation.begin(), rank.mean_validation.end());
  EXPECT_EQ(*low, rank.mean_validation[std::find(rank.grid.begin(), rank.grid.end(), rank.best) - rank.grid.begin()]);
}

TEST(SelectL2, TiesPreferLargerStrength) {
  const Dataset ds = oracle::synthetic_dataset(12, 2, 2, 19);
  ModelConfig c = small_config(CellKind::SRN, 3, 1);
  c.optimizer.learning_rate = 1e-12;
  TrainConfig t;
  t.max_epochs = 1;
  const L2Selection sel = select_l2(ds, c, t, {1e-8, 1e-6, 1e-4}, 3, CostFunction(CostKind::Hamming));
  EXPECT_EQ(sel.mean_validation[0], sel.mean_validation[2]);
  EXPECT_EQ(sel.best, 1e-4);
}

TEST(SelectL2, OnePointGridSkipsSearch) {
  const Dataset ds = oracle::synthetic_dataset(12, 2, 2, 20);
  const L2Selection sel = select_l2(ds, ModelConfig{}, TrainConfig{}, {1e-3}, 3, CostFunction(CostKind::F1));
  EXPECT_EQ(sel.best, 1e-3);
  EXPECT_EQ(sel.training_runs, 0u);
}

TEST(MemoryMatrix, Normalization) {
  EXPECT_EQ(normalize_memory_matrix(Tensor::identity(3)).matrix, Tensor::identity(3));
  const MemoryMatrix m = normalize_memory_matrix(Tensor::from_rows({{2, 4}, {1, 5}}));
  EXPECT_DOUBLE_EQ(m.matrix(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.matrix(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(m.matrix(1, 0), 0.2);
  EXPECT_DOUBLE_EQ(m.matrix(1, 1), 1.0);
  const MemoryMatrix z = normalize_memory_matrix(Tensor::from_rows({{0, 3}, {1, 2}}));
  EXPECT_EQ(z.unnormalized, (std::vector<bool>{true, false}));
  EXPECT_EQ(z.matrix(0, 1), 3.0);
}

TEST(MemoryMatrix, ExtractionOrientationAndPreconditions) {
  RethinkNet m(small_config(CellKind::SRN, 2, 3), 4, 2);
  // Internal row j holds the weights into unit j.
  *m.parameters()[1] = Tensor::from_rows({{2, 1}, {4, 5}});
  const MemoryMatrix mm = extract_memory_matrix(m);
  EXPECT_DOUBLE_EQ(mm.matrix(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(mm.matrix(1, 0), 0.2);
  EXPECT_THROW(extract_memory_matrix(RethinkNet(small_config(CellKind::LSTM, 2, 3), 4, 2)), ConfigurationError);
  EXPECT_THROW(extract_memory_matrix(RethinkNet(small_config(CellKind::SRN, 3, 3), 4, 2)), ConfigurationError);
}

TEST(Serialization, RoundTripIsBitwise) {
  const Dataset ds = oracle::synthetic_dataset(40, 5, 3, 21);
  auto [scaled, scaling] = scale_features(ds);
  ModelConfig c = small_config(CellKind::LSTM, 6, 3, 99);
  c.cost = CostFunction(CostKind::RankLoss);
  c.l2_strength = 1e-5;
  RethinkNet m(c, 5, 3);
  TrainConfig t;
  t.max_epochs = 3;
  m.fit(scaled, t);
  const auto path = std::filesystem::temp_directory_path() / "rethink_model_rt.bin";
  save_model(path, m, scaling);
  const ModelBundle back = load_model(path);
  EXPECT_EQ(back.model.config().cost, c.cost);
  EXPECT_EQ(back.model.config().seed, 99u);
  EXPECT_EQ(back.model.history(), m.history());
  ASSERT_TRUE(back.scaling.has_value());
  EXPECT_EQ(back.scaling->min, scaling.min);
  EXPECT_EQ(back.scaling->max, scaling.max);
  const auto a = m.forward(scaled.features, nullptr, nullptr);
  const auto b = back.model.forward(scaled.features, nullptr, nullptr);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);

  std::ofstream(path, std::ios::binary) << "not a model";
  EXPECT_THROW(load_model(path), SchemaError);
  std::filesystem::remove(path);
}


TEST(IdentityDense, FrozenLayerAndGradients) {
  ModelConfig c = small_config(CellKind::SRN, 3, 3, 4);
  c.identity_dense = true;
  c.l2_strength = 1e-2;
  EXPECT_THROW(RethinkNet(c, 4, 2), ConfigurationError);
  RethinkNet m(c, 4, 3);
  EXPECT_EQ(m.dense(), Tensor::identity(3));
  EXPECT_EQ(m.parameter_count(), 3u * (4 + 3 + 1));
  const Dataset ds = oracle::synthetic_dataset(4, 4, 3, 8);
  const Tensor y = label_tensor(ds.labels);
  ForwardTape tape;
  m.forward(ds.features, nullptr, &tape);
  const std::vector<Tensor> weights = m.importance_weights(tape.probs, ds.labels);
  auto grads = m.backward(tape, y, weights);
  EXPECT_EQ(grads[3], Tensor(3, 3));
  EXPECT_EQ(grads[4], Tensor(1, 3));
  const long double base = oracle::reference_loss(m, ds.features, y, nullptr, weights);
  EXPECT_NEAR(static_cast<double>(base), m.training_loss(ds.features, ds.labels, nullptr, &weights).total, 1e-12);
  auto all = m.parameters();
  const std::vector<Tensor*> params(all.begin(), all.begin() + 3);
  grads.resize(3);
  auto loss = [&] { return static_cast<double>(oracle::reference_loss(m, ds.features, y, nullptr, weights) - base); };
  EXPECT_LT(gradient_check(loss, params, grads).max_relative_error, 1e-5);
  TrainConfig t;
  t.max_epochs = 5;
  m.fit(ds, t);
  EXPECT_EQ(m.dense(), Tensor::identity(3));
  EXPECT_EQ(m.dense_bias(), Tensor(1, 3));
}

}  // namespace
}  // namespace rethink
