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

#include "rethink/costs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rethink/error.hpp"

namespace rethink {

LabelVector::LabelVector(std::size_t k) : bits_(k, 0) {}

LabelVector::LabelVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw ParameterError("label vector entries must be 0 or 1");
  }
}

LabelVector::LabelVector(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw ParameterError("label vector entries must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

void LabelVector::set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }

LabelVector LabelVector::with_bit(std::size_t i, bool v) const {
  LabelVector copy = *this;
  copy.set(i, v);
  return copy;
}

std::size_t LabelVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

void require_same_length(const LabelVector& y, const LabelVector& yhat) {
  if (y.size() != yhat.size()) {
    throw DimensionError("label vectors differ in length: " + std::to_string(y.size()) + " vs " +
                         std::to_string(yhat.size()));
  }
}

// Joint counts over (truth, prediction).
struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(const LabelVector& y, const LabelVector& yhat) {
  Confusion c;
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y[k]) {
      yhat[k] ? ++c.tp : ++c.fn;
    } else {
      yhat[k] ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

double f1_from(double tp, double truth, double pred) {
  const double denom = truth + pred;
  return denom == 0.0 ? 1.0 : 2.0 * tp / denom;
}

double accuracy_from(double inter, double uni) { return uni == 0.0 ? 1.0 : inter / uni; }

// Rank loss as a function of the four confusion cells: positives predicted
// 0 against negatives predicted 1 are reversed pairs, equal predictions tie.
double rank_from(double tp, double fn, double fp, double tn) {
  return fn * fp + 0.5 * (tp * fp + fn * tn);
}

}  // namespace

double hamming_loss(const LabelVector& y, const LabelVector& yhat) {
  require_same_length(y, yhat);
  const Confusion c = confusion(y, yhat);
  return static_cast<double>(c.fp + c.fn) / static_cast<double>(y.size());
}

double f1_score(const LabelVector& y, const LabelVector& yhat) {
  require_same_length(y, yhat);
  const Confusion c = confusion(y, yhat);
  return f1_from(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn),
                 static_cast<double>(c.tp + c.fp));
}

double accuracy_score(const LabelVector& y, const LabelVector& yhat) {
  require_same_length(y, yhat);
  const Confusion c = confusion(y, yhat);
  return accuracy_from(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp + c.fn));
}

double rank_loss(const LabelVector& y, const LabelVector& yhat) {
  require_same_length(y, yhat);
  const Confusion c = confusion(y, yhat);
  return rank_from(static_cast<double>(c.tp), static_cast<double>(c.fn), static_cast<double>(c.fp),
                   static_cast<double>(c.tn));
}

CostFunction CostFunction::parse(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "hamming") return CostFunction(CostKind::Hamming);
  if (s == "f1") return CostFunction(CostKind::F1);
  if (s == "accuracy" || s == "acc") return CostFunction(CostKind::Accuracy);
  if (s == "rankloss" || s == "rank" || s == "rank_loss") return CostFunction(CostKind::RankLoss);
  throw ParameterError("unknown cost function '" + std::string(name) + "'");
}

std::vector<CostFunction> CostFunction::all() {
  return {CostFunction(CostKind::Hamming), CostFunction(CostKind::RankLoss),
          CostFunction(CostKind::F1), CostFunction(CostKind::Accuracy)};
}

std::string CostFunction::name() const {
  switch (kind_) {
    case CostKind::Hamming: return "hamming";
    case CostKind::F1: return "f1";
    case CostKind::Accuracy: return "accuracy";
    case CostKind::RankLoss: return "rankloss";
  }
  return "?";
}

double CostFunction::operator()(const LabelVector& y, const LabelVector& yhat) const {
  switch (kind_) {
    case CostKind::Hamming: return hamming_loss(y, yhat);
    case CostKind::F1: return f1_score(y, yhat);
    case CostKind::Accuracy: return accuracy_score(y, yhat);
    case CostKind::RankLoss: return rank_loss(y, yhat);
  }
  return 0.0;
}

void raw_cost_differences(const LabelVector& y, const LabelVector& yhat_prev, CostFunction cost,
                          std::span<double> out) {
  require_same_length(y, yhat_prev);
  if (out.size() != y.size()) throw DimensionError("weight buffer length differs from K");
  const Confusion c = confusion(y, yhat_prev);
  const double k = static_cast<double>(y.size());

  for (std::size_t i = 0; i < y.size(); ++i) {
    // Confusion counts with label i removed, then re-added with bit b.
    double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    const bool truth = y[i];
    if (truth) {
      yhat_prev[i] ? --tp : --fn;
    } else {
      yhat_prev[i] ? --fp : --tn;
    }
    auto cost_with = [&](bool bit) {
      double tp_b = tp + (truth && bit), fn_b = fn + (truth && !bit);
      double fp_b = fp + (!truth && bit), tn_b = tn + (!truth && !bit);
      switch (cost.kind()) {
        case CostKind::Hamming: return fp_b + fn_b;
        case CostKind::F1: return f1_from(tp_b, tp_b + fn_b, tp_b + fp_b);
        case CostKind::Accuracy: return accuracy_from(tp_b, tp_b + fp_b + fn_b);
        case CostKind::RankLoss: return rank_from(tp_b, fn_b, fp_b, tn_b);
      }
      return 0.0;
    };
    out[i] = std::abs(cost_with(false) - cost_with(true));
    // Mismatch counts are exact; divide once so every label gets the same 1/K.
    if (cost.kind() == CostKind::Hamming) out[i] /= k;
  }
}

void normalize_weights(std::span<double> raw, WeightNormalization norm) {
  if (raw.empty()) return;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  if (*hi == 0.0) {
    std::fill(raw.begin(), raw.end(), 1.0);
    return;
  }
  if (norm == WeightNormalization::Raw) return;
  if (*lo == *hi) {
    std::fill(raw.begin(), raw.end(), 1.0);
    return;
  }
  double sum = 0.0;
  for (double v : raw) sum += v;
  const double scale = static_cast<double>(raw.size()) / sum;
  for (double& v : raw) v *= scale;
}

ImportanceWeights label_importance_weights(const LabelVector& y,
                                           const std::optional<LabelVector>& yhat_prev,
                                           CostFunction cost, WeightNormalization norm) {
  ImportanceWeights w;
  w.values.assign(y.size(), 1.0);
  if (!yhat_prev) return w;
  w.iteration = 2;
  raw_cost_differences(y, *yhat_prev, cost, w.values);
  normalize_weights(w.values, norm);
  return w;
}

}  // namespace rethink
