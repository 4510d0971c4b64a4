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

// rethinknet: command-line front end for training, evaluation and the
// experiment protocols.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rethink/error.hpp"
#include "rethink/harness.hpp"
#include "rethink/parallel.hpp"

namespace {

using namespace rethink;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

struct DataOptions {
  std::string path;
  std::string format;
  std::string labels;
};

struct ModelOptions {
  std::string cost = "hamming";
  std::string cell = "lstm";
  std::size_t hidden = 128;
  std::size_t iters = 3;
  bool no_reweight = false;
  bool identity_dense = false;
  std::string l2 = "0";
  std::uint64_t seed = 0;
  std::size_t epochs = 1000;
  std::size_t batch = 256;
  std::size_t patience = 10;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--data", d.path, "Dataset file (.arff or native)")->required();
  cmd->add_option("--format", d.format, "Force the file format")->check(CLI::IsMember({"arff", "native"}));
  cmd->add_option("--labels", d.labels, "ARFF label columns: last_k:<K> or xml:<path>");
}

void add_model_options(CLI::App* cmd, ModelOptions& m) {
  cmd->add_option("--cost", m.cost, "hamming|f1|accuracy|rankloss")->capture_default_str();
  cmd->add_option("--cell", m.cell, "srn|gru|lstm|irnn")->capture_default_str();
  cmd->add_option("--hidden", m.hidden, "Hidden units")->capture_default_str();
  cmd->add_option("--iters", m.iters, "Rethink iterations B")->capture_default_str();
  cmd->add_flag("--no-reweight", m.no_reweight, "Train with unit weights");
  cmd->add_flag("--identity-dense", m.identity_dense, "Fix the dense layer to the identity (needs --hidden = K)");
  cmd->add_option("--l2", m.l2, "L2 strength, or 'cv' for a 3-fold grid search")->capture_default_str();
  cmd->add_option("--seed", m.seed, "Model seed")->capture_default_str();
  cmd->add_option("--epochs", m.epochs, "Maximum epochs")->capture_default_str();
  cmd->add_option("--batch-size", m.batch, "Mini-batch size")->capture_default_str();
  cmd->add_option("--patience", m.patience, "Epochs without improvement before stopping")->capture_default_str();
}

Dataset load(const DataOptions& d) {
  const LabelSpec labels = d.labels.empty() ? LabelSpec{} : LabelSpec::parse(d.labels);
  if (d.format == "arff") return load_arff(d.path, labels);
  if (d.format == "native") return load_native(d.path);
  return load_dataset(d.path, labels);
}

bool wants_cv(const ModelOptions& m) { return m.l2 == "cv"; }

ModelConfig model_config(const ModelOptions& m) {
  ModelConfig c;
  c.cost = CostFunction::parse(m.cost);
  c.cell = parse_cell_kind(m.cell);
  c.hidden_dim = m.hidden;
  c.rethink_iterations = m.iters;
  c.reweighted = !m.no_reweight;
  c.identity_dense = m.identity_dense;
  c.seed = m.seed;
  if (!wants_cv(m)) {
    try {
      std::size_t used = 0;
      c.l2_strength = std::stod(m.l2, &used);
      if (used != m.l2.size()) throw std::invalid_argument(m.l2);
    } catch (const std::logic_error&) {
      throw ParameterError("--l2 expects a number or 'cv', got '" + m.l2 + "'");
    }
  }
  c.validate();
  return c;
}

TrainConfig train_config(const ModelOptions& m) {
  TrainConfig t;
  t.max_epochs = m.epochs;
  t.batch_size = m.batch;
  t.patience = m.patience;
  t.validate();
  return t;
}

ExperimentSpec experiment_spec(const ModelOptions& m, std::size_t repeats) {
  ExperimentSpec s;
  s.model = model_config(m);
  s.train = train_config(m);
  s.repeats = repeats;
  s.cross_validate_l2 = wants_cv(m);
  s.threads = thread_budget();
  return s;
}

// Divergence of every run is reported as a divergence failure.
int finish_report(const ExperimentReport& r, const std::string& out) {
  emit_report(r, ReportFormat::Json, out);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << '\n';
  bool any = false;
  for (const RunRecord& run : r.runs) any = any || !run.diverged;
  if (!any) {
    std::cerr << "error: every run diverged\n";
    return kExitDivergence;
  }
  std::cout << format_markdown(r);
  return 0;
}

std::size_t hidden_for_budget(const ModelConfig& base, std::size_t d, std::size_t k, std::size_t budget) {
  auto count = [&](std::size_t h) {
    ModelConfig c = base;
    c.hidden_dim = h;
    return RethinkNet(c, d, k).parameter_count();
  };
  if (count(1) > budget) throw ParameterError("parameter budget below the smallest model");
  std::size_t lo = 1;
  std::size_t hi = 2;
  while (count(hi) <= budget) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    (count(mid) <= budget ? lo : hi) = mid;
  }
  return lo;
}

int run(int argc, char** argv) {
  CLI::App app{"RethinkNet cost-sensitive multi-label classification"};
  app.require_subcommand(1);

  DataOptions data;
  ModelOptions model;
  std::string out;
  std::string in;
  std::string model_path;
  std::string format = "md";
  std::size_t repeats = 10;
  bool all_criteria = false;
  bool per_iteration = false;
  bool paired = false;
  std::size_t budget = 0;

  auto* train = app.add_subcommand("train", "Train one model on a whole dataset");
  add_data_options(train, data);
  add_model_options(train, model);
  train->add_option("--out", out, "Model file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model");
  eval->add_option("--model", model_path, "Model file")->required();
  add_data_options(eval, data);
  eval->add_flag("--all-criteria", all_criteria, "Report all four criteria");
  eval->add_flag("--per-iteration", per_iteration, "Report every rethink iteration");
  eval->add_option("--out", out, "Also write the results as JSON");

  auto* experiment = app.add_subcommand("experiment", "Repeated-split protocol");
  auto* ablate = app.add_subcommand("ablate-reweight", "Reweighted against non-reweighted training");
  auto* cells = app.add_subcommand("compare-cells", "SRN, GRU, LSTM and IRNN under one protocol");
  auto* baseline = app.add_subcommand("baseline-br", "Binary relevance network baseline");
  for (CLI::App* cmd : {experiment, ablate, cells, baseline}) {
    add_data_options(cmd, data);
    add_model_options(cmd, model);
    cmd->add_option("--repeats", repeats, "Number of random splits")->capture_default_str();
    cmd->add_option("--out", out, "Report file (JSON)")->required();
  }
  cells->add_option("--param-budget", budget, "Pick hidden_dim per cell as the largest within this parameter count");
  baseline->add_flag("--paired", paired, "Also run RethinkNet on the same splits and t-test per criterion");

  auto* correlation = app.add_subcommand("correlation", "Memory matrix against label correlation");
  correlation->add_option("--model", model_path, "SRN model file with hidden_dim = K")->required();
  add_data_options(correlation, data);
  correlation->add_option("--out", out, "Matrices file (JSON)")->required();

  auto* report = app.add_subcommand("report", "Render a JSON report");
  report->add_option("--in", in, "Report file (JSON)")->required();
  report->add_option("--format", format, "md|csv|json")->capture_default_str();
  report->add_option("--out", out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (train->parsed()) {
    const ModelConfig cfg0 = model_config(model);
    const TrainConfig tc = train_config(model);
    auto [ds, scaling] = scale_features(load(data));
    ModelConfig cfg = cfg0;
    if (wants_cv(model)) {
      cfg.l2_strength = select_l2(ds, cfg, tc, default_l2_grid(), 3, cfg.cost, thread_budget()).best;
      std::cerr << "selected l2 = " << cfg.l2_strength << '\n';
    }
    RethinkNet net(cfg, ds.n_features(), ds.n_labels());
    const TrainHistory h = net.fit(ds, tc);
    save_model(out, net, scaling);
    std::cout << "trained " << h.epoch_loss.size() << " epochs, final loss " << h.epoch_loss.back() << '\n';
    return 0;
  }

  if (eval->parsed()) {
    const ModelBundle bundle = load_model(model_path);
    Dataset ds = load(data);
    if (bundle.scaling) ds = bundle.scaling->apply(ds);
    const auto results = bundle.model.evaluate_all(ds);
    const auto costs = CostFunction::all();
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t c = 0; c < costs.size(); ++c) {
      if (!all_criteria && costs[c] != bundle.model.config().cost) continue;
      const auto& series = results[c].per_iteration;
      j[costs[c].name()] = per_iteration ? series : std::vector<double>{results[c].final};
      if (per_iteration) {
        for (std::size_t t = 0; t < series.size(); ++t) {
          std::printf("%-9s t=%zu %.6f\n", costs[c].name().c_str(), t + 1, series[t]);
        }
      } else {
        std::printf("%-9s %.6f\n", costs[c].name().c_str(), results[c].final);
      }
    }
    if (!out.empty()) write_file_atomic(out, j.dump(2) + "\n");
    return 0;
  }

  if (experiment->parsed()) return finish_report(run_experiment(load(data), experiment_spec(model, repeats)), out);
  if (ablate->parsed()) return finish_report(compare_reweighting(load(data), experiment_spec(model, repeats)), out);
  if (cells->parsed()) {
    const Dataset ds = load(data);
    const ExperimentSpec spec = experiment_spec(model, repeats);
    const std::vector<CellKind> kinds{CellKind::SRN, CellKind::GRU, CellKind::LSTM, CellKind::IRNN};
    std::map<CellKind, std::size_t> hidden;
    if (budget > 0) {
      for (CellKind k : kinds) {
        ModelConfig c = spec.model;
        c.cell = k;
        hidden[k] = hidden_for_budget(c, ds.n_features(), ds.n_labels(), budget);
      }
    }
    return finish_report(compare_cells(ds, spec, kinds, hidden), out);
  }
  if (baseline->parsed()) {
    return finish_report(br_baseline(load(data), experiment_spec(model, repeats), model.hidden, paired), out);
  }

  if (correlation->parsed()) {
    const ModelBundle bundle = load_model(model_path);
    Dataset ds = load(data);
    if (bundle.scaling) ds = bundle.scaling->apply(ds);
    const CorrelationAnalysis a = export_correlation_analysis(bundle.model, ds);
    write_file_atomic(out, to_json(a).dump(2) + "\n");
    std::cout << "off-diagonal agreement " << a.off_diagonal_agreement << '\n';
    return 0;
  }

  if (report->parsed()) {
    std::ifstream f(in);
    if (!f) throw Error("cannot read " + in);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("bad report: ") + e.what());
    }
    const std::string text = format_report(report_from_json(j), parse_report_format(format));
    if (out.empty()) {
      std::cout << text;
    } else {
      write_file_atomic(out, text);
    }
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rethink::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const rethink::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rethink::ConfigurationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rethink::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
