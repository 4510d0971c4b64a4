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

#ifndef RETHINK_HARNESS_HPP_
#define RETHINK_HARNESS_HPP_

// Experiment protocol: repeated random 75/25 splits (split seed = repeat
// index), features scaled on the training part, one model per run, all four
// criteria recorded at every rethink iteration on both parts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rethink/cells.hpp"
#include "rethink/costs.hpp"
#include "rethink/data.hpp"
#include "rethink/model.hpp"

namespace rethink {

inline constexpr int kReportSchemaVersion = 1;

struct ExperimentSpec {
  ModelConfig model;
  TrainConfig train;
  std::size_t repeats = 10;
  // Pick l2 per run by k-fold search on the training part.
  bool cross_validate_l2 = false;
  std::vector<double> l2_grid = default_l2_grid();
  std::size_t folds = 3;
  std::size_t threads = 1;
};

/// One trained model. Values are indexed [criterion name][t - 1].
struct RunRecord {
  std::string arm;
  std::uint64_t seed = 0;  // split seed; the model seed is config.seed + seed
  bool diverged = false;
  std::string error;
  double l2_strength = 0.0;
  std::size_t epochs = 0;
  std::size_t parameter_count = 0;
  std::map<std::string, std::vector<double>> train;
  std::map<std::string, std::vector<double>> test;
  double seconds = 0.0;  // wall clock, excluded from reproducibility
};

struct Aggregate {
  double mean = 0.0;
  double ste = 0.0;  // sample std / sqrt(runs); NaN with fewer than 2 runs
  std::size_t runs = 0;
};

/// Per-arm statistics over completed runs, at the final iteration and as
/// per-iteration means.
struct ArmSummary {
  std::string arm;
  std::size_t parameter_count = 0;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, Aggregate> train;
  std::map<std::string, Aggregate> test;
  std::map<std::string, std::vector<double>> train_curve;
  std::map<std::string, std::vector<double>> test_curve;
};

enum class Verdict { Win, Tie, Loss };
std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

struct TTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Verdict verdict = Verdict::Tie;
  double mean_difference = 0.0;
  std::size_t n = 0;
};

/// Two-sided paired t-test on a - b at the 95% level. Win means `a` is
/// better under `direction`. Zero-variance differences: all zero -> tie
/// with p = 1; otherwise p = 0 and the sign decides.
TTestResult paired_ttest(std::span<const double> a, std::span<const double> b,
                         Direction direction = Direction::HigherBetter);

struct Comparison {
  std::string criterion;
  std::string arm_a;
  std::string arm_b;
  TTestResult result;
};

struct Tally {
  std::size_t win = 0;
  std::size_t tie = 0;
  std::size_t loss = 0;
};

Tally tally(std::span<const Comparison> comparisons);

struct ExperimentReport {
  std::string kind;
  std::string dataset;
  nlohmann::json config;
  std::size_t iterations = 0;
  std::vector<std::string> arms;
  std::vector<RunRecord> runs;
  std::vector<ArmSummary> summaries;
  std::vector<Comparison> comparisons;
  std::vector<std::string> warnings;

  const ArmSummary& summary(const std::string& arm) const;
  /// Completed-run values of `criterion` at iteration t (1-based, 0 = last).
  std::vector<double> values(const std::string& arm, const std::string& criterion, bool test = true,
                             std::size_t t = 0) const;
};

/// Trains and evaluates one configuration on split `seed`.
RunRecord run_single(const Dataset& ds, std::uint64_t seed, const ModelConfig& config, const ExperimentSpec& spec,
                     const std::string& arm);

/// Fills summaries and warnings from runs (arms in report.arms order).
void summarize(ExperimentReport& report);

ExperimentReport run_experiment(const Dataset& ds, const ExperimentSpec& spec);
ExperimentReport run_experiment(const std::filesystem::path& path, const LabelSpec& labels,
                                const ExperimentSpec& spec);

struct CurveRow {
  std::size_t t = 0;
  double train = 0.0;
  double test = 0.0;
};

/// Mean train/test value of `criterion` at each iteration.
std::vector<CurveRow> rethink_curve(const ExperimentReport& report, const std::string& criterion,
                                    const std::string& arm = {});

/// Non-reweighted against cost-reweighted training on the same split and
/// model seeds. One reweighted arm per criterion; a paired t-test per
/// criterion compares that arm with the non-reweighted one.
ExperimentReport compare_reweighting(const Dataset& ds, const ExperimentSpec& spec);

/// Same protocol per cell kind; `hidden` overrides hidden_dim per cell.
ExperimentReport compare_cells(const Dataset& ds, const ExperimentSpec& spec,
                               const std::vector<CellKind>& cells = {CellKind::SRN, CellKind::GRU, CellKind::LSTM,
                                                                    CellKind::IRNN},
                               const std::map<CellKind, std::size_t>& hidden = {});

/// Feed-forward binary relevance network: one ReLU hidden layer, sigmoid
/// outputs, unweighted cross-entropy, Nadam and the shared stopping rule.
class BinaryRelevanceNet {
 public:
  BinaryRelevanceNet(std::size_t input_dim, std::size_t n_labels, std::size_t hidden = 128, double l2 = 0.0,
                     std::uint64_t seed = 0, NadamConfig optimizer = {});

  Tensor probabilities(const Tensor& x) const;
  std::vector<LabelVector> predict(const Tensor& x) const;
  TrainHistory fit(const Dataset& train, const TrainConfig& config);
  std::size_t parameter_count() const;

  /// [W1, b1, W2, b2]
  std::vector<Tensor*> parameters();
  double loss(const Tensor& x, const Tensor& y) const;
  /// Gradients of loss(), aligned with parameters().
  std::vector<Tensor> gradients(const Tensor& x, const Tensor& y) const;

 private:
  double train_batch(const Tensor& x, const Tensor& y);

  Tensor w1_;  // d x hidden
  Tensor b1_;
  Tensor w2_;  // hidden x K
  Tensor b2_;
  double l2_;
  OptimizerState optimizer_;
  std::mt19937_64 rng_;
};

/// Binary relevance arm under the experiment protocol; spec.model supplies
/// l2 and the seed. With `paired` a RethinkNet arm is run on the same
/// seeds and compared per criterion.
ExperimentReport br_baseline(const Dataset& ds, const ExperimentSpec& spec, std::size_t hidden = 128,
                             bool paired = false);

struct CorrelationAnalysis {
  std::vector<std::string> label_names;
  Tensor memory;                  // row-normalized recurrent matrix
  std::vector<bool> unnormalized;
  Tensor label_correlation;       // Pearson correlation of label columns
  double off_diagonal_agreement;  // Pearson r between the off-diagonal entries; NaN if undefined
};

/// Pearson correlation matrix of label columns; constant columns correlate
/// 0 with everything else and 1 with themselves.
Tensor label_correlation(const Dataset& ds);

CorrelationAnalysis export_correlation_analysis(const RethinkNet& model, const Dataset& ds);
nlohmann::json to_json(const CorrelationAnalysis& a);

// ---------------------------------------------------------------------------
// Report emission

enum class ReportFormat { Json, Csv, Markdown };
ReportFormat parse_report_format(const std::string& name);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);
/// JSON without wall-clock fields, used for reproducibility comparisons.
nlohmann::json reproducible_json(const ExperimentReport& report);

/// CSV: one row per (completed run, criterion, t) with train and test values.
std::string format_csv(const ExperimentReport& report);
/// Markdown: criteria as rows, arms as columns, mean ± ste, best bolded.
std::string format_markdown(const ExperimentReport& report);
std::string format_report(const ExperimentReport& report, ReportFormat format);

/// Writes atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace rethink

#endif  // RETHINK_HARNESS_HPP_
