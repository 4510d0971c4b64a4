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

// Acceptance checks. Usage: acceptance [criterion...]; with no arguments
// every criterion runs. One PASS/FAIL line per criterion; the exit status is
// non-zero when any selected criterion fails.
//
// Dataset paths for criteria 4-6 come from RETHINK_YEAST and RETHINK_SCENE
// (ARFF or native). ARFF label columns default to the last 14 (yeast) and
// last 6 (scene); RETHINK_YEAST_LABELS / RETHINK_SCENE_LABELS override with
// any --labels value.

#include <unistd.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reference_loss.hpp"
#include "rethink/dropout.hpp"
#include "rethink/error.hpp"
#include "rethink/gradient_check.hpp"
#include "rethink/harness.hpp"
#include "rethink/parallel.hpp"

namespace {

using namespace rethink;

// Pinned tolerances.
constexpr double kOracleTolerance = 1e-12;
constexpr double kGradientTolerance = 1e-5;
constexpr int kGradientTrialsPerCell = 20;
constexpr double kRankLossMargin = 0.20;
constexpr double kHeadlineHamming = 0.22;
constexpr double kHeadlineF1 = 0.60;
constexpr std::size_t kDeskRepeats = 3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr CostKind kKinds[] = {CostKind::Hamming, CostKind::RankLoss, CostKind::F1, CostKind::Accuracy};

Outcome criterion1() {
  double worst = 0.0;
  std::size_t pairs = 0;
  for (std::size_t k = 1; k <= 6; ++k) {
    for (std::uint32_t a = 0; a < (1u << k); ++a) {
      const auto ya = oracle::bits_of(a, k);
      const LabelVector y = oracle::from_bits(ya);
      for (std::uint32_t b = 0; b < (1u << k); ++b) {
        const auto yb = oracle::bits_of(b, k);
        const LabelVector yhat = oracle::from_bits(yb);
        for (CostKind kind : kKinds) {
          worst = std::max(worst, std::abs(CostFunction(kind)(y, yhat) - oracle::evaluate(kind, ya, yb)));
        }
        ++pairs;
      }
    }
  }
  return {worst <= kOracleTolerance, std::to_string(pairs) + " pairs x 4 criteria, max |diff| " + fmt(worst)};
}

Outcome criterion2() {
  double worst = 0.0;
  std::size_t hamming_not_ones = 0;
  std::size_t cases = 0;
  for (std::size_t k = 1; k <= 6; ++k) {
    for (std::uint32_t a = 0; a < (1u << k); ++a) {
      const LabelVector y = oracle::from_bits(oracle::bits_of(a, k));
      for (std::uint32_t b = 0; b < (1u << k); ++b) {
        const LabelVector prev = oracle::from_bits(oracle::bits_of(b, k));
        for (CostKind kind : kKinds) {
          for (WeightNormalization norm : {WeightNormalization::MeanOne, WeightNormalization::Raw}) {
            const auto got = label_importance_weights(y, prev, CostFunction(kind), norm);
            const auto want = oracle::flip_oracle_weights(y, prev, CostFunction(kind), norm);
            for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(got.values[i] - want.values[i]));
            if (kind == CostKind::Hamming && norm == WeightNormalization::MeanOne &&
                got.values != std::vector<double>(k, 1.0)) {
              ++hamming_not_ones;
            }
            ++cases;
          }
        }
      }
    }
  }
  return {worst <= kOracleTolerance && hamming_not_ones == 0,
          std::to_string(cases) + " cases, max |diff| " + fmt(worst) + ", Hamming non-unit weight vectors " +
              std::to_string(hamming_not_ones)};
}

Tensor label_tensor(const std::vector<LabelVector>& labels) {
  Tensor y(labels.size(), labels.front().size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    for (std::size_t i = 0; i < labels[n].size(); ++i) y(n, i) = labels[n][i];
  }
  return y;
}

Outcome criterion3() {
  std::mt19937_64 rng(2026);
  std::ostringstream detail;
  bool pass = true;
  for (CellKind kind : {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::IRNN}) {
    double worst = 0.0;
    int failed = 0;
    for (int trial = 0; trial < kGradientTrialsPerCell; ++trial) {
      const std::size_t h = 1 + rng() % 8;
      const std::size_t d = 1 + rng() % 6;
      const std::size_t k = 1 + rng() % 4;
      const std::size_t n = 1 + rng() % 4;
      ModelConfig c;
      c.cell = kind;
      c.hidden_dim = h;
      c.rethink_iterations = 3;
      c.l2_strength = 1e-2;
      c.reweighted = true;
      c.cost = CostFunction(kKinds[rng() % 4]);
      c.seed = rng();
      RethinkNet m(c, d, k);
      std::normal_distribution<double> g(0.0, 0.3);
      for (double& v : m.parameters()[2]->values()) v = g(rng);
      for (double& v : m.parameters()[4]->values()) v = g(rng);
      const Dataset ds = oracle::synthetic_dataset(n, d, k, rng());
      const Tensor y = label_tensor(ds.labels);
      const Tensor mask = recurrent_dropout_mask(m.cell().recurrent.rows(), h, c.recurrent_dropout, rng);
      ForwardTape tape;
      m.forward(ds.features, &mask, &tape);
      const std::vector<Tensor> weights = m.importance_weights(tape.probs, ds.labels);
      const auto grads = m.backward(tape, y, weights);
      const long double base = oracle::reference_loss(m, ds.features, y, &mask, weights);
      const double lib = m.training_loss(ds.features, ds.labels, &mask, &weights).total;
      if (std::abs(static_cast<double>(base) - lib) > kOracleTolerance) {
        ++failed;
        continue;
      }
      auto loss = [&] { return static_cast<double>(oracle::reference_loss(m, ds.features, y, &mask, weights) - base); };
      const double err = gradient_check(loss, m.parameters(), grads).max_relative_error;
      worst = std::max(worst, err);
      if (!(err < kGradientTolerance)) ++failed;
    }
    pass = pass && failed == 0;
    detail << to_string(kind) << " worst " << fmt(worst) << " (" << failed << " failed) ";
  }
  return {pass, detail.str()};
}

// -- real-data criteria ------------------------------------------------------

struct DataSource {
  const char* env;
  const char* labels_env;
  const char* default_labels;
  const char* name;
};

constexpr DataSource kYeast{"RETHINK_YEAST", "RETHINK_YEAST_LABELS", "last_k:14", "yeast"};
constexpr DataSource kScene{"RETHINK_SCENE", "RETHINK_SCENE_LABELS", "last_k:6", "scene"};

std::optional<Dataset> load_source(const DataSource& src, std::string& why) {
  const char* path = std::getenv(src.env);
  if (!path || !*path) {
    why = std::string(src.name) + " dataset unavailable (set " + src.env + ")";
    return std::nullopt;
  }
  if (!std::filesystem::exists(path)) {
    why = std::string(src.name) + " dataset not found at " + path;
    return std::nullopt;
  }
  const char* labels = std::getenv(src.labels_env);
  Dataset ds = load_dataset(path, LabelSpec::parse(labels && *labels ? labels : src.default_labels));
  ds.name = src.name;
  return ds;
}

ExperimentSpec desk_spec(CellKind cell, CostKind cost, bool reweighted) {
  ExperimentSpec s;
  s.model.cell = cell;
  s.model.hidden_dim = 128;
  s.model.rethink_iterations = 3;
  s.model.cost = CostFunction(cost);
  s.model.reweighted = reweighted;
  s.repeats = kDeskRepeats;
  s.threads = thread_budget();
  return s;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome criterion4() {
  std::ostringstream detail;
  bool pass = true;
  for (const DataSource& src : {kScene, kYeast}) {
    std::string why;
    const auto ds = load_source(src, why);
    if (!ds) return {false, why};
    const ExperimentReport r = run_experiment(*ds, desk_spec(CellKind::SRN, CostKind::RankLoss, true));
    const double t1 = mean(r.values("rethinknet", "rankloss", true, 1));
    const double t3 = mean(r.values("rethinknet", "rankloss", true, 3));
    pass = pass && t3 <= t1;
    detail << src.name << " rankloss t=1 " << fmt(t1) << " t=3 " << fmt(t3) << "; ";
  }
  return {pass, detail.str()};
}

Outcome criterion5() {
  std::string why;
  const auto ds = load_source(kYeast, why);
  if (!ds) return {false, why};
  std::map<std::string, double> rw;
  std::map<std::string, double> plain;
  for (CostKind kind : {CostKind::RankLoss, CostKind::F1}) {
    const CostFunction cost(kind);
    ExperimentSpec on = desk_spec(CellKind::LSTM, kind, true);
    ExperimentSpec off = desk_spec(CellKind::LSTM, kind, false);
    rw[cost.name()] = mean(run_experiment(*ds, on).values("rethinknet", cost.name()));
    plain[cost.name()] = mean(run_experiment(*ds, off).values("rethinknet", cost.name()));
  }
  const bool rank_ok = rw["rankloss"] <= (1.0 - kRankLossMargin) * plain["rankloss"];
  const bool f1_ok = rw["f1"] > plain["f1"];
  return {rank_ok && f1_ok, "yeast rankloss reweighted " + fmt(rw["rankloss"]) + " vs " + fmt(plain["rankloss"]) +
                                ", f1 reweighted " + fmt(rw["f1"]) + " vs " + fmt(plain["f1"])};
}

Outcome criterion6() {
  std::string why;
  const auto ds = load_source(kYeast, why);
  if (!ds) return {false, why};
  const double hamming =
      mean(run_experiment(*ds, desk_spec(CellKind::LSTM, CostKind::Hamming, true)).values("rethinknet", "hamming"));
  const double f1 = mean(run_experiment(*ds, desk_spec(CellKind::LSTM, CostKind::F1, true)).values("rethinknet", "f1"));
  return {hamming <= kHeadlineHamming && f1 >= kHeadlineF1,
          "yeast test hamming " + fmt(hamming) + " (<= " + fmt(kHeadlineHamming) + "), f1 " + fmt(f1) +
              " (>= " + fmt(kHeadlineF1) + ")"};
}

// -- synthetic criteria ------------------------------------------------------

Outcome criterion7() {
  std::size_t batches = 0;
  std::size_t mismatched = 0;
  bool params_equal = true;
  for (CellKind kind : {CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::IRNN}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const Dataset ds = oracle::synthetic_dataset(150, 6, 5, 40 + seed);
      TrainConfig tc;
      tc.max_epochs = 15;
      tc.batch_size = 32;
      std::vector<TrainHistory> hist;
      std::vector<std::vector<double>> params;
      for (bool reweighted : {true, false}) {
        ModelConfig c;
        c.cell = kind;
        c.hidden_dim = 12;
        c.cost = CostFunction(CostKind::Hamming);
        c.reweighted = reweighted;
        c.seed = seed;
        RethinkNet m(c, 6, 5);
        hist.push_back(m.fit(ds, tc));
        std::vector<double> flat;
        for (const Tensor* p : std::as_const(m).parameters()) flat.insert(flat.end(), p->values().begin(), p->values().end());
        params.push_back(std::move(flat));
      }
      if (hist[0].batch_loss.size() != hist[1].batch_loss.size()) {
        ++mismatched;
        continue;
      }
      for (std::size_t i = 0; i < hist[0].batch_loss.size(); ++i) {
        ++batches;
        if (std::bit_cast<std::uint64_t>(hist[0].batch_loss[i]) != std::bit_cast<std::uint64_t>(hist[1].batch_loss[i])) {
          ++mismatched;
        }
      }
      params_equal = params_equal && params[0] == params[1];
    }
  }
  return {mismatched == 0 && params_equal && batches > 0,
          std::to_string(batches) + " batch losses compared, " + std::to_string(mismatched) +
              " differ; final parameters " + (params_equal ? "identical" : "differ")};
}

Outcome criterion8() {
  int hits = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Dataset ds = oracle::duplicate_label_dataset(600, 6, 500 + seed);
    auto [train, scaling] = scale_features(ds);
    ModelConfig c;
    c.cell = CellKind::SRN;
    c.hidden_dim = 3;
    c.rethink_iterations = 3;
    c.cost = CostFunction(CostKind::Hamming);
    c.identity_dense = true;
    c.seed = seed;
    RethinkNet m(c, train.n_features(), 3);
    TrainConfig tc;
    tc.batch_size = 32;
    m.fit(train, tc);
    const MemoryMatrix mem = extract_memory_matrix(m);
    const double dup = std::abs(mem.matrix(0, 1));
    const double noise = std::abs(mem.matrix(0, 2));
    hits += dup > noise ? 1 : 0;
    detail << "seed " << seed << " |W12| " << fmt(dup) << " |W13| " << fmt(noise) << "; ";
  }
  detail << hits << "/3 seeds";
  return {hits >= 2, detail.str()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9() {
  const auto dir = std::filesystem::temp_directory_path() / ("rethink_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  save_native(oracle::synthetic_dataset(120, 5, 4, 9), dir / "toy.txt");
  std::vector<std::string> texts;
  for (int i = 0; i < 2; ++i) {
    const auto out = dir / ("report" + std::to_string(i) + ".json");
    const std::string cmd = std::string("\"") + RETHINKNET_CLI + "\" experiment --data \"" + (dir / "toy.txt").string() +
                            "\" --repeats 3 --cell gru --hidden 8 --epochs 20 --batch-size 32 --cost f1 --l2 cv --out \"" +
                            out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      std::filesystem::remove_all(dir);
      return {false, "CLI run " + std::to_string(i + 1) + " failed"};
    }
    texts.push_back(read_file(out));
  }
  std::filesystem::remove_all(dir);
  auto strip = [](const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    j.erase("timing");
    return j.dump(2);
  };
  const std::string a = strip(texts[0]);
  const std::string b = strip(texts[1]);
  return {a == b, std::to_string(a.size()) + " bytes without timing, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"cost-function oracle equivalence (K <= 6, exhaustive)", criterion1},
      {"importance weights equal flip oracle; Hamming weights exactly one", criterion2},
      {"BPTT gradients match central differences (B=3, weights, L2, all cells)", criterion3},
      {"rethink iterations do not worsen test rank loss (scene, yeast; SRN-128)", criterion4},
      {"reweighting lowers yeast rank loss by >= 20% and raises F1", criterion5},
      {"yeast LSTM-128 B=3: hamming <= 0.22 and F1 >= 0.60", criterion6},
      {"Hamming reweighted and non-reweighted training are bitwise identical", criterion7},
      {"SRN memory matrix ranks the duplicated label above the noise label", criterion8},
      {"experiment CLI reruns give identical JSON apart from timing", criterion9},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(n));
  }
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(i);
  }
  bool all = true;
  for (std::size_t n : selected) {
    Outcome o;
    try {
      o = criteria[n - 1].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %zu: %s  %s  [%s]\n", n, o.pass ? "PASS" : "FAIL", criteria[n - 1].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
