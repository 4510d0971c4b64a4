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

#include "rethink/harness.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "rethink/error.hpp"
#include "rethink/json_io.hpp"
#include "rethink/loss.hpp"
#include "rethink/parallel.hpp"

namespace rethink {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void record_results(std::map<std::string, std::vector<double>>& out, const std::vector<EvalResult>& results) {
  const auto costs = CostFunction::all();
  for (std::size_t c = 0; c < costs.size(); ++c) out[costs[c].name()] = results[c].per_iteration;
}

std::vector<EvalResult> evaluate_predictions(const Dataset& ds, const std::vector<LabelVector>& pred) {
  std::vector<EvalResult> out;
  for (CostFunction cost : CostFunction::all()) {
    EvalResult r;
    r.final = mean_cost(cost, ds.labels, pred);
    r.per_iteration = {r.final};
    out.push_back(r);
  }
  return out;
}

struct PreparedSplit {
  Dataset train;
  Dataset test;
};

PreparedSplit prepare_split(const Dataset& ds, std::uint64_t seed) {
  const Split sp = split(ds, seed);
  auto [train, scaling] = scale_features(ds.subset(sp.train_indices));
  return {std::move(train), scaling.apply(ds.subset(sp.test_indices))};
}

using Job = std::function<RunRecord()>;

std::vector<RunRecord> run_jobs(const std::vector<Job>& jobs, std::size_t threads) {
  std::vector<RunRecord> out(jobs.size());
  parallel_for(jobs.size(), std::max<std::size_t>(1, threads), [&](std::size_t i) { out[i] = jobs[i](); });
  return out;
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  return {{"model", to_json(spec.model)},
          {"train", to_json(spec.train)},
          {"repeats", spec.repeats},
          {"cross_validate_l2", spec.cross_validate_l2},
          {"l2_grid", spec.l2_grid},
          {"folds", spec.folds}};
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.repeats < 2) throw ParameterError("an experiment needs at least 2 repeats");
  spec.model.validate();
  spec.train.validate();
}

// Values of two arms on the seeds where both completed, in seed order.
std::pair<std::vector<double>, std::vector<double>> paired_values(const ExperimentReport& r, const std::string& a,
                                                                  const std::string& b,
                                                                  const std::string& criterion) {
  std::map<std::uint64_t, double> va;
  for (const RunRecord& run : r.runs) {
    if (run.arm == a && !run.diverged) va[run.seed] = run.test.at(criterion).back();
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  std::map<std::uint64_t, double> vb;
  for (const RunRecord& run : r.runs) {
    if (run.arm == b && !run.diverged) vb[run.seed] = run.test.at(criterion).back();
  }
  for (const auto& [seed, v] : va) {
    if (auto it = vb.find(seed); it != vb.end()) {
      out.first.push_back(v);
      out.second.push_back(it->second);
    }
  }
  return out;
}

void add_comparison(ExperimentReport& r, const std::string& a, const std::string& b, CostFunction cost) {
  if (r.summary(a).seeds != r.summary(b).seeds) {
    throw StateError("arms '" + a + "' and '" + b + "' were not run on the same split seeds");
  }
  auto [va, vb] = paired_values(r, a, b, cost.name());
  if (va.size() < 2) {
    r.warnings.push_back("fewer than 2 paired runs for " + cost.name() + ": " + a + " vs " + b + "; no t-test");
    return;
  }
  r.comparisons.push_back({cost.name(), a, b, paired_ttest(va, vb, cost.direction())});
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Win: return "win";
    case Verdict::Tie: return "tie";
    case Verdict::Loss: return "loss";
  }
  return "tie";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "win") return Verdict::Win;
  if (s == "loss") return Verdict::Loss;
  if (s == "tie") return Verdict::Tie;
  throw SchemaError("unknown verdict '" + s + "'");
}

TTestResult paired_ttest(std::span<const double> a, std::span<const double> b, Direction direction) {
  if (a.size() != b.size()) throw DimensionError("paired t-test needs equal-length samples");
  if (a.size() < 2) throw SizeError("paired t-test needs at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);

  TTestResult r;
  r.n = n;
  r.mean_difference = mean;
  if (var == 0.0) {
    if (mean == 0.0) return r;
    r.statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p_value = 0.0;
  } else {
    r.statistic = mean / std::sqrt(var / static_cast<double>(n));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
  }
  if (r.p_value < 0.05) {
    const bool a_better = direction == Direction::HigherBetter ? mean > 0.0 : mean < 0.0;
    r.verdict = a_better ? Verdict::Win : Verdict::Loss;
  }
  return r;
}

Tally tally(std::span<const Comparison> comparisons) {
  Tally t;
  for (const Comparison& c : comparisons) {
    switch (c.result.verdict) {
      case Verdict::Win: ++t.win; break;
      case Verdict::Tie: ++t.tie; break;
      case Verdict::Loss: ++t.loss; break;
    }
  }
  return t;
}

const ArmSummary& ExperimentReport::summary(const std::string& arm) const {
  for (const ArmSummary& s : summaries) {
    if (s.arm == arm) return s;
  }
  throw ParameterError("report has no arm '" + arm + "'");
}

std::vector<double> ExperimentReport::values(const std::string& arm, const std::string& criterion, bool test,
                                             std::size_t t) const {
  std::vector<double> out;
  for (const RunRecord& run : runs) {
    if (run.arm != arm || run.diverged) continue;
    const auto& series = (test ? run.test : run.train).at(criterion);
    if (t > series.size()) throw ParameterError("iteration " + std::to_string(t) + " out of range");
    out.push_back(t == 0 ? series.back() : series[t - 1]);
  }
  return out;
}

// ---------------------------------------------------------------------------

RunRecord run_single(const Dataset& ds, std::uint64_t seed, const ModelConfig& config, const ExperimentSpec& spec,
                     const std::string& arm) {
  const auto start = Clock::now();
  RunRecord rec;
  rec.arm = arm;
  rec.seed = seed;
  const PreparedSplit data = prepare_split(ds, seed);
  ModelConfig cfg = config;
  cfg.seed = config.seed + seed;
  try {
    if (spec.cross_validate_l2) {
      cfg.l2_strength = select_l2(data.train, cfg, spec.train, spec.l2_grid, spec.folds, cfg.cost, 1).best;
    }
    rec.l2_strength = cfg.l2_strength;
    RethinkNet model(cfg, ds.n_features(), ds.n_labels());
    rec.parameter_count = model.parameter_count();
    rec.epochs = model.fit(data.train, spec.train).epoch_loss.size();
    record_results(rec.train, model.evaluate_all(data.train));
    record_results(rec.test, model.evaluate_all(data.test));
  } catch (const DivergenceError& e) {
    rec.diverged = true;
    rec.error = e.what();
  }
  rec.seconds = seconds_since(start);
  return rec;
}

void summarize(ExperimentReport& report) {
  report.summaries.clear();
  report.iterations = 0;
  for (const std::string& arm : report.arms) {
    ArmSummary s;
    s.arm = arm;
    std::vector<const RunRecord*> done;
    for (const RunRecord& run : report.runs) {
      if (run.arm != arm) continue;
      s.seeds.push_back(run.seed);
      if (run.diverged) {
        report.warnings.push_back("arm " + arm + " seed " + std::to_string(run.seed) +
                                  " excluded from aggregates: " + run.error);
        continue;
      }
      if (s.parameter_count == 0) s.parameter_count = run.parameter_count;
      done.push_back(&run);
    }
    if (done.size() < 2) {
      report.warnings.push_back("arm " + arm + " has " + std::to_string(done.size()) +
                                " completed runs; standard error undefined");
    }
    if (!done.empty()) {
      for (const auto& [criterion, series] : done.front()->test) {
        const std::size_t b = series.size();
        report.iterations = std::max(report.iterations, b);
        for (bool test : {false, true}) {
          std::vector<double> curve(b, 0.0);
          std::vector<double> finals;
          for (const RunRecord* run : done) {
            const auto& v = (test ? run->test : run->train).at(criterion);
            for (std::size_t t = 0; t < b; ++t) curve[t] += v[t];
            finals.push_back(v.back());
          }
          for (double& c : curve) c /= static_cast<double>(done.size());
          Aggregate agg;
          agg.runs = finals.size();
          agg.mean = std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(agg.runs);
          if (agg.runs >= 2) {
            double ss = 0.0;
            for (double v : finals) ss += (v - agg.mean) * (v - agg.mean);
            agg.ste = std::sqrt(ss / static_cast<double>(agg.runs - 1)) / std::sqrt(static_cast<double>(agg.runs));
          } else {
            agg.ste = kNaN;
          }
          (test ? s.test : s.train)[criterion] = agg;
          (test ? s.test_curve : s.train_curve)[criterion] = std::move(curve);
        }
      }
    }
    report.summaries.push_back(std::move(s));
  }
}

ExperimentReport run_experiment(const Dataset& ds, const ExperimentSpec& spec) {
  check_spec(spec);
  ds.validate();
  ExperimentReport report;
  report.kind = "experiment";
  report.dataset = ds.name;
  report.config = spec_to_json(spec);
  report.arms = {"rethinknet"};
  std::vector<Job> jobs;
  for (std::uint64_t r = 0; r < spec.repeats; ++r) {
    jobs.push_back([&, r] { return run_single(ds, r, spec.model, spec, "rethinknet"); });
  }
  report.runs = run_jobs(jobs, spec.threads);
  summarize(report);
  return report;
}

ExperimentReport run_experiment(const std::filesystem::path& path, const LabelSpec& labels,
                                const ExperimentSpec& spec) {
  return run_experiment(load_dataset(path, labels), spec);
}

std::vector<CurveRow> rethink_curve(const ExperimentReport& report, const std::string& criterion,
                                    const std::string& arm) {
  const ArmSummary& s = report.summary(arm.empty() ? report.arms.front() : arm);
  const auto& train = s.train_curve.at(criterion);
  const auto& test = s.test_curve.at(criterion);
  std::vector<CurveRow> rows;
  for (std::size_t t = 0; t < test.size(); ++t) rows.push_back({t + 1, train[t], test[t]});
  return rows;
}

ExperimentReport compare_reweighting(const Dataset& ds, const ExperimentSpec& spec) {
  check_spec(spec);
  ds.validate();
  ExperimentReport report;
  report.kind = "ablate-reweight";
  report.dataset = ds.name;
  report.config = spec_to_json(spec);
  const auto costs = CostFunction::all();
  // Without l2 search the cost does not influence non-reweighted training,
  // so that arm is trained once per seed.
  auto plain_arm = [&](CostFunction c) {
    return spec.cross_validate_l2 ? "non-reweighted:" + c.name() : std::string("non-reweighted");
  };
  std::vector<Job> jobs;
  auto add_arm = [&](const std::string& arm, ModelConfig cfg) {
    report.arms.push_back(arm);
    for (std::uint64_t r = 0; r < spec.repeats; ++r) {
      jobs.push_back([&ds, &spec, arm, cfg, r] { return run_single(ds, r, cfg, spec, arm); });
    }
  };
  for (CostFunction c : costs) {
    if (std::find(report.arms.begin(), report.arms.end(), plain_arm(c)) != report.arms.end()) continue;
    ModelConfig cfg = spec.model;
    cfg.reweighted = false;
    cfg.cost = c;
    add_arm(plain_arm(c), cfg);
  }
  for (CostFunction c : costs) {
    ModelConfig cfg = spec.model;
    cfg.reweighted = true;
    cfg.cost = c;
    add_arm("reweighted:" + c.name(), cfg);
  }
  report.runs = run_jobs(jobs, spec.threads);
  summarize(report);
  for (CostFunction c : costs) add_comparison(report, "reweighted:" + c.name(), plain_arm(c), c);
  return report;
}

ExperimentReport compare_cells(const Dataset& ds, const ExperimentSpec& spec, const std::vector<CellKind>& cells,
                               const std::map<CellKind, std::size_t>& hidden) {
  check_spec(spec);
  ds.validate();
  ExperimentReport report;
  report.kind = "compare-cells";
  report.dataset = ds.name;
  report.config = spec_to_json(spec);
  nlohmann::json dims = nlohmann::json::object();
  std::vector<Job> jobs;
  for (CellKind cell : cells) {
    ModelConfig cfg = spec.model;
    cfg.cell = cell;
    if (auto it = hidden.find(cell); it != hidden.end()) cfg.hidden_dim = it->second;
    const std::string arm = to_string(cell);
    dims[arm] = cfg.hidden_dim;
    report.arms.push_back(arm);
    for (std::uint64_t r = 0; r < spec.repeats; ++r) {
      jobs.push_back([&ds, &spec, arm, cfg, r] { return run_single(ds, r, cfg, spec, arm); });
    }
  }
  report.config["hidden_dim_per_cell"] = dims;
  report.runs = run_jobs(jobs, spec.threads);
  summarize(report);
  return report;
}

// ---------------------------------------------------------------------------

BinaryRelevanceNet::BinaryRelevanceNet(std::size_t input_dim, std::size_t n_labels, std::size_t hidden, double l2,
                                       std::uint64_t seed, NadamConfig optimizer)
    : l2_(l2), rng_(seed) {
  if (input_dim < 1 || n_labels < 1 || hidden < 1) throw DimensionError("BR network needs d, K, hidden >= 1");
  if (!(l2 >= 0.0)) throw ParameterError("l2 must be >= 0");
  w1_ = init::glorot_uniform(input_dim, hidden, rng_);
  b1_ = Tensor(1, hidden);
  w2_ = init::glorot_uniform(hidden, n_labels, rng_);
  b2_ = Tensor(1, n_labels);
  const std::vector<const Tensor*> params{&w1_, &b1_, &w2_, &b2_};
  optimizer_ = OptimizerState::for_params(params, optimizer);
}

std::vector<Tensor*> BinaryRelevanceNet::parameters() { return {&w1_, &b1_, &w2_, &b2_}; }

std::size_t BinaryRelevanceNet::parameter_count() const {
  return w1_.size() + b1_.size() + w2_.size() + b2_.size();
}

Tensor BinaryRelevanceNet::probabilities(const Tensor& x) const {
  if (x.cols() != w1_.rows()) throw DimensionError("input width does not match the BR network");
  Matrix h = x.mat() * w1_.mat();
  h.rowwise() += b1_.mat().row(0);
  h = h.cwiseMax(0.0);
  Matrix z = h * w2_.mat();
  z.rowwise() += b2_.mat().row(0);
  return Tensor(Matrix((1.0 / (1.0 + (-z.array()).exp())).matrix()));
}

std::vector<LabelVector> BinaryRelevanceNet::predict(const Tensor& x) const { return binarize(probabilities(x)); }

double BinaryRelevanceNet::loss(const Tensor& x, const Tensor& y) const {
  const Tensor p = probabilities(x);
  return weighted_bce(p, y, Tensor(p.rows(), p.cols(), 1.0)) +
         l2_ * (w1_.mat().squaredNorm() + w2_.mat().squaredNorm());
}

std::vector<Tensor> BinaryRelevanceNet::gradients(const Tensor& x, const Tensor& y) const {
  Matrix h = x.mat() * w1_.mat();
  h.rowwise() += b1_.mat().row(0);
  h = h.cwiseMax(0.0);
  Matrix z = h * w2_.mat();
  z.rowwise() += b2_.mat().row(0);
  const Tensor p(Matrix((1.0 / (1.0 + (-z.array()).exp())).matrix()));
  const Tensor dz = weighted_bce_logit_grad(p, y, Tensor(p.rows(), p.cols(), 1.0));
  const Matrix dh = ((dz.mat() * w2_.mat().transpose()).array() * (h.array() > 0.0).cast<double>()).matrix();
  std::vector<Tensor> g;
  g.emplace_back(Matrix(x.mat().transpose() * dh + 2.0 * l2_ * w1_.mat()));
  g.emplace_back(Matrix(dh.colwise().sum()));
  g.emplace_back(Matrix(h.transpose() * dz.mat() + 2.0 * l2_ * w2_.mat()));
  g.emplace_back(Matrix(dz.mat().colwise().sum()));
  return g;
}

double BinaryRelevanceNet::train_batch(const Tensor& x, const Tensor& y) {
  const double l = loss(x, y);
  if (!std::isfinite(l)) return l;
  const auto g = gradients(x, y);
  nadam_step(parameters(), g, optimizer_);
  return l;
}

TrainHistory BinaryRelevanceNet::fit(const Dataset& train, const TrainConfig& config) {
  train.validate();
  if (train.n_features() != w1_.rows() || train.n_labels() != w2_.cols()) {
    throw DimensionError("dataset shape does not match the BR network");
  }
  const Tensor y_all = train.label_matrix();
  return run_minibatch_training(train.n_examples(), config, rng_, [&](std::span<const std::size_t> rows) {
    Matrix xb(static_cast<Eigen::Index>(rows.size()), train.features.mat().cols());
    Matrix yb(static_cast<Eigen::Index>(rows.size()), y_all.mat().cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      xb.row(static_cast<Eigen::Index>(i)) = train.features.mat().row(static_cast<Eigen::Index>(rows[i]));
      yb.row(static_cast<Eigen::Index>(i)) = y_all.mat().row(static_cast<Eigen::Index>(rows[i]));
    }
    return train_batch(Tensor(std::move(xb)), Tensor(std::move(yb)));
  });
}

ExperimentReport br_baseline(const Dataset& ds, const ExperimentSpec& spec, std::size_t hidden, bool paired) {
  check_spec(spec);
  ds.validate();
  ExperimentReport report;
  report.kind = "baseline-br";
  report.dataset = ds.name;
  report.config = spec_to_json(spec);
  report.config["br_hidden"] = hidden;
  std::vector<Job> jobs;
  report.arms.push_back("br");
  for (std::uint64_t r = 0; r < spec.repeats; ++r) {
    jobs.push_back([&ds, &spec, hidden, r] {
      const auto start = Clock::now();
      RunRecord rec;
      rec.arm = "br";
      rec.seed = r;
      const PreparedSplit data = prepare_split(ds, r);
      double l2 = spec.model.l2_strength;
      try {
        if (spec.cross_validate_l2 && spec.l2_grid.size() > 1) {
          const auto parts = kfold(data.train.n_examples(), spec.folds, spec.model.seed + r);
          const CostFunction cost = spec.model.cost;
          std::vector<double> mean(spec.l2_grid.size(), 0.0);
          for (std::size_t g = 0; g < spec.l2_grid.size(); ++g) {
            for (std::size_t f = 0; f < spec.folds; ++f) {
              std::vector<std::size_t> rows;
              for (std::size_t o = 0; o < spec.folds; ++o) {
                if (o != f) rows.insert(rows.end(), parts[o].begin(), parts[o].end());
              }
              std::sort(rows.begin(), rows.end());
              BinaryRelevanceNet net(ds.n_features(), ds.n_labels(), hidden, spec.l2_grid[g], spec.model.seed + r,
                                     spec.model.optimizer);
              net.fit(data.train.subset(rows), spec.train);
              const Dataset val = data.train.subset(parts[f]);
              mean[g] += mean_cost(cost, val.labels, net.predict(val.features)) / static_cast<double>(spec.folds);
            }
          }
          std::size_t best = 0;
          for (std::size_t g = 1; g < mean.size(); ++g) {
            if (cost.better(mean[g], mean[best]) || (mean[g] == mean[best] && spec.l2_grid[g] > spec.l2_grid[best])) {
              best = g;
            }
          }
          l2 = spec.l2_grid[best];
        }
        rec.l2_strength = l2;
        BinaryRelevanceNet net(ds.n_features(), ds.n_labels(), hidden, l2, spec.model.seed + r, spec.model.optimizer);
        rec.parameter_count = net.parameter_count();
        rec.epochs = net.fit(data.train, spec.train).epoch_loss.size();
        record_results(rec.train, evaluate_predictions(data.train, net.predict(data.train.features)));
        record_results(rec.test, evaluate_predictions(data.test, net.predict(data.test.features)));
      } catch (const DivergenceError& e) {
        rec.diverged = true;
        rec.error = e.what();
      }
      rec.seconds = seconds_since(start);
      return rec;
    });
  }
  if (paired) {
    report.arms.push_back("rethinknet");
    for (std::uint64_t r = 0; r < spec.repeats; ++r) {
      jobs.push_back([&ds, &spec, r] { return run_single(ds, r, spec.model, spec, "rethinknet"); });
    }
  }
  report.runs = run_jobs(jobs, spec.threads);
  summarize(report);
  if (paired) {
    for (CostFunction c : CostFunction::all()) add_comparison(report, "rethinknet", "br", c);
  }
  return report;
}

// ---------------------------------------------------------------------------

Tensor label_correlation(const Dataset& ds) {
  const Tensor y = ds.label_matrix();
  const std::size_t k = y.cols();
  const double n = static_cast<double>(y.rows());
  const Eigen::RowVectorXd mean = y.mat().colwise().sum() / n;
  Matrix centered = y.mat().rowwise() - mean;
  const Matrix cov = centered.transpose() * centered;
  Tensor out(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double denom = std::sqrt(cov(ii, ii) * cov(jj, jj));
      if (i == j) {
        out(i, j) = 1.0;
      } else {
        out(i, j) = denom > 0.0 ? cov(ii, jj) / denom : 0.0;
      }
    }
  }
  return out;
}

CorrelationAnalysis export_correlation_analysis(const RethinkNet& model, const Dataset& ds) {
  if (ds.n_labels() != model.n_labels()) throw DimensionError("dataset K does not match the model");
  const MemoryMatrix mem = extract_memory_matrix(model);
  CorrelationAnalysis a{ds.label_names, mem.matrix, mem.unnormalized, label_correlation(ds), kNaN};
  std::vector<double> xs;
  std::vector<double> ys;
  const std::size_t k = model.n_labels();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      xs.push_back(a.memory(i, j));
      ys.push_back(a.label_correlation(i, j));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx > 0.0 && syy > 0.0) a.off_diagonal_agreement = sxy / std::sqrt(sxx * syy);
  }
  return a;
}

}  // namespace rethink
