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

#ifndef RETHINK_DATA_HPP_
#define RETHINK_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rethink/costs.hpp"
#include "rethink/tensor.hpp"

namespace rethink {

/// N examples: features (N x d) and N label vectors of length K.
struct Dataset {
  Tensor features;
  std::vector<LabelVector> labels;
  std::string name;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;

  std::size_t n_examples() const noexcept { return features.rows(); }
  std::size_t n_features() const noexcept { return features.cols(); }
  std::size_t n_labels() const noexcept { return labels.empty() ? 0 : labels.front().size(); }

  /// Checks N, d, K >= 1, equal N, equal K and finite features.
  void validate() const;
  /// Labels as an N x K 0/1 tensor.
  Tensor label_matrix() const;
  /// Rows `idx` in the given order.
  Dataset subset(const std::vector<std::size_t>& idx) const;
};

struct DatasetStats {
  std::size_t n_examples = 0;
  std::size_t n_features = 0;
  std::size_t n_labels = 0;
  double cardinality = 0.0;
  double density = 0.0;
};

DatasetStats stats(const Dataset& ds);

/// Label selection for ARFF files: the last K attributes, or the names in a
/// MULAN XML label file (in file order).
struct LabelSpec {
  enum class Kind { LastK, Xml } kind = Kind::LastK;
  std::size_t last_k = 0;
  std::filesystem::path xml_path;

  /// "last_k:<K>", "xml:<path>", or a bare path to an .xml file.
  static LabelSpec parse(std::string_view text);
};

/// Reads the numeric / binary-nominal ARFF subset, dense and sparse rows.
Dataset load_arff(const std::filesystem::path& path, const LabelSpec& labels);
Dataset parse_arff(std::string_view text, const LabelSpec& labels, std::string name = "arff");
/// Label names from `<label name="..."/>` elements, in document order.
std::vector<std::string> read_mulan_labels(const std::filesystem::path& xml_path);
std::vector<std::string> parse_mulan_labels(std::string_view xml);

/// Native text format:
///   line 1:   "N d K"
///   N lines:  "<comma-separated relevant label indices>\t<space-separated index:value pairs>"
/// Feature values not listed are 0.
Dataset load_native(const std::filesystem::path& path);
Dataset parse_native(std::string_view text, std::string name = "native");
void save_native(const Dataset& ds, const std::filesystem::path& path);
std::string format_native(const Dataset& ds);

/// Per-feature min/max from training data.
struct ScalingParams {
  std::vector<double> min;
  std::vector<double> max;

  /// Maps each feature to [0,1]; constant features map to 0, out-of-range
  /// values are clipped.
  Tensor apply(const Tensor& features) const;
  Dataset apply(const Dataset& ds) const;
};

ScalingParams fit_scaling(const Tensor& features);
std::pair<Dataset, ScalingParams> scale_features(const Dataset& ds);

struct Split {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

/// Random 75/25 split; |train| = round(0.75 N). Requires N >= 4.
Split split(std::size_t n_examples, std::uint64_t seed);
inline Split split(const Dataset& ds, std::uint64_t seed) { return split(ds.n_examples(), seed); }

/// Deterministic k-fold partition of 0..n-1 (shuffled with `seed`).
std::vector<std::vector<std::size_t>> kfold(std::size_t n_examples, std::size_t folds,
                                            std::uint64_t seed);

/// Dispatch on extension: ".arff" -> ARFF, anything else -> native.
Dataset load_dataset(const std::filesystem::path& path, const LabelSpec& labels);

}  // namespace rethink

#endif  // RETHINK_DATA_HPP_
