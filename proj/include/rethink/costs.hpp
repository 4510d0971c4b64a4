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

#ifndef RETHINK_COSTS_HPP_
#define RETHINK_COSTS_HPP_

// Multi-label evaluation criteria and cost-difference label weights.
//
// Four criteria compare a ground-truth label vector y with a prediction:
//
//   Hamming loss   (1/K) * #{k : y[k] != yhat[k]}                  lower is better
//   F1 score       2|y & yhat| / (|y| + |yhat|)                     higher is better
//   Accuracy       |y & yhat| / |y | yhat|                          higher is better
//   Rank loss      sum over (i,j), y[i] > y[j], of
//                  [yhat[i] < yhat[j]] + 0.5 [yhat[i] == yhat[j]]   lower is better
//
// F1 and Accuracy are 1 when both vectors are empty.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rethink {

/// Binary relevance vector of fixed length K >= 1.
class LabelVector {
 public:
  LabelVector() = default;
  /// All-zero vector of length k.
  explicit LabelVector(std::size_t k);
  /// Throws ParameterError if any entry is not 0 or 1.
  explicit LabelVector(std::vector<std::uint8_t> bits);
  LabelVector(std::initializer_list<int> bits);

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool v);
  /// Copy with bit i forced to v.
  LabelVector with_bit(std::size_t i, bool v) const;
  std::size_t count() const noexcept;
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class CostKind { Hamming, F1, Accuracy, RankLoss };
enum class Direction { LowerBetter, HigherBetter };

double hamming_loss(const LabelVector& y, const LabelVector& yhat);
double f1_score(const LabelVector& y, const LabelVector& yhat);
double accuracy_score(const LabelVector& y, const LabelVector& yhat);
double rank_loss(const LabelVector& y, const LabelVector& yhat);

class CostFunction {
 public:
  constexpr CostFunction() = default;
  constexpr explicit CostFunction(CostKind kind) : kind_(kind) {}

  /// Accepts "hamming", "f1", "accuracy", "rankloss" (also "rank", "acc").
  static CostFunction parse(std::string_view name);
  static std::vector<CostFunction> all();

  constexpr CostKind kind() const noexcept { return kind_; }
  constexpr Direction direction() const noexcept {
    return (kind_ == CostKind::Hamming || kind_ == CostKind::RankLoss) ? Direction::LowerBetter
                                                                       : Direction::HigherBetter;
  }
  std::string name() const;

  double operator()(const LabelVector& y, const LabelVector& yhat) const;

  /// True when `a` is strictly better than `b` under this criterion.
  bool better(double a, double b) const noexcept {
    return direction() == Direction::LowerBetter ? a < b : a > b;
  }

  friend constexpr bool operator==(CostFunction, CostFunction) = default;

 private:
  CostKind kind_ = CostKind::Hamming;
};

enum class WeightNormalization {
  MeanOne,  // scale so the K weights average to 1
  Raw,      // absolute cost differences as-is
};

/// Per-label importance weights for one example at one rethink iteration.
struct ImportanceWeights {
  std::vector<double> values;
  int iteration = 1;  // 1 for the first iteration, 2 for any later one
};

/// Cost-difference weights. With no previous prediction (first iteration)
/// every weight is 1. Otherwise weight i is
///   |C(y, yhat_prev with bit i = 0) - C(y, yhat_prev with bit i = 1)|
/// computed in O(K) from label counts, then normalized. All-zero raw weights
/// fall back to all ones. Equal raw weights normalize to exactly 1.
ImportanceWeights label_importance_weights(const LabelVector& y,
                                           const std::optional<LabelVector>& yhat_prev,
                                           CostFunction cost,
                                           WeightNormalization norm = WeightNormalization::MeanOne);

/// Same as above, writing raw (unnormalized) differences into `out`.
/// `out.size()` must equal y.size().
void raw_cost_differences(const LabelVector& y, const LabelVector& yhat_prev, CostFunction cost,
                          std::span<double> out);

/// In-place normalization shared by the weight routes.
void normalize_weights(std::span<double> raw, WeightNormalization norm);

}  // namespace rethink

#endif  // RETHINK_COSTS_HPP_
