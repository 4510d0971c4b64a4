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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rethink/error.hpp"
#include "rethink/harness.hpp"

namespace rethink {

namespace {

using json = nlohmann::json;

// Non-finite values serialize as null.
double number(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json aggregate_to_json(const Aggregate& a) { return {{"mean", a.mean}, {"ste", a.ste}, {"runs", a.runs}}; }

Aggregate aggregate_from_json(const json& j) {
  return {number(j.at("mean")), number(j.at("ste")), j.at("runs").get<std::size_t>()};
}

json aggregates_to_json(const std::map<std::string, Aggregate>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = aggregate_to_json(v);
  return out;
}

std::map<std::string, Aggregate> aggregates_from_json(const json& j) {
  std::map<std::string, Aggregate> out;
  for (const auto& [k, v] : j.items()) out[k] = aggregate_from_json(v);
  return out;
}

json series_to_json(const std::map<std::string, std::vector<double>>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

std::map<std::string, std::vector<double>> series_from_json(const json& j) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [k, v] : j.items()) {
    std::vector<double> values;
    for (const json& x : v) values.push_back(number(x));
    out[k] = std::move(values);
  }
  return out;
}

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void markdown_table(std::ostringstream& os, const ExperimentReport& r, bool test) {
  os << "| criterion |";
  for (const std::string& arm : r.arms) os << ' ' << arm << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < r.arms.size(); ++i) os << "---|";
  os << '\n';
  for (CostFunction cost : CostFunction::all()) {
    const std::string name = cost.name();
    std::vector<const Aggregate*> cells;
    const Aggregate* best = nullptr;
    for (const std::string& arm : r.arms) {
      const auto& m = test ? r.summary(arm).test : r.summary(arm).train;
      auto it = m.find(name);
      const Aggregate* a = (it == m.end() || it->second.runs == 0) ? nullptr : &it->second;
      cells.push_back(a);
      if (a && (!best || cost.better(a->mean, best->mean))) best = a;
    }
    os << "| " << name << (cost.direction() == Direction::LowerBetter ? " (lower is better)" : " (higher is better)")
       << " |";
    for (const Aggregate* a : cells) {
      if (!a) {
        os << " n/a |";
        continue;
      }
      std::string text = fixed(a->mean) + " ± " + fixed(a->ste);
      if (best && a->mean == best->mean) text = "**" + text + "**";
      os << ' ' << text << " |";
    }
    os << '\n';
  }
  os << "| parameters |";
  for (const std::string& arm : r.arms) os << ' ' << r.summary(arm).parameter_count << " |";
  os << '\n';
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md" || name == "markdown") return ReportFormat::Markdown;
  throw ParameterError("unknown report format '" + name + "' (json, csv, md)");
}

json reproducible_json(const ExperimentReport& r) {
  json runs = json::array();
  for (const RunRecord& run : r.runs) {
    runs.push_back({{"arm", run.arm},
                    {"seed", run.seed},
                    {"diverged", run.diverged},
                    {"error", run.error},
                    {"l2_strength", run.l2_strength},
                    {"epochs", run.epochs},
                    {"parameter_count", run.parameter_count},
                    {"train", series_to_json(run.train)},
                    {"test", series_to_json(run.test)}});
  }
  json summaries = json::array();
  for (const ArmSummary& s : r.summaries) {
    summaries.push_back({{"arm", s.arm},
                         {"parameter_count", s.parameter_count},
                         {"seeds", s.seeds},
                         {"train", aggregates_to_json(s.train)},
                         {"test", aggregates_to_json(s.test)},
                         {"train_curve", series_to_json(s.train_curve)},
                         {"test_curve", series_to_json(s.test_curve)}});
  }
  json comparisons = json::array();
  for (const Comparison& c : r.comparisons) {
    comparisons.push_back({{"criterion", c.criterion},
                           {"arm_a", c.arm_a},
                           {"arm_b", c.arm_b},
                           {"statistic", c.result.statistic},
                           {"p_value", c.result.p_value},
                           {"verdict", to_string(c.result.verdict)},
                           {"mean_difference", c.result.mean_difference},
                           {"n", c.result.n}});
  }
  const Tally t = tally(r.comparisons);
  return {{"schema", "rethinknet-report"},
          {"schema_version", kReportSchemaVersion},
          {"kind", r.kind},
          {"dataset", r.dataset},
          {"config", r.config},
          {"iterations", r.iterations},
          {"arms", r.arms},
          {"runs", runs},
          {"summaries", summaries},
          {"comparisons", comparisons},
          {"tally", {{"win", t.win}, {"tie", t.tie}, {"loss", t.loss}}},
          {"warnings", r.warnings}};
}

json to_json(const ExperimentReport& r) {
  json j = reproducible_json(r);
  json runs = json::array();
  double total = 0.0;
  for (const RunRecord& run : r.runs) {
    runs.push_back({{"arm", run.arm}, {"seed", run.seed}, {"seconds", run.seconds}});
    total += run.seconds;
  }
  j["timing"] = {{"total_seconds", total}, {"runs", runs}};
  return j;
}

ExperimentReport report_from_json(const json& j) {
  try {
    if (j.at("schema") != "rethinknet-report") throw SchemaError("not a rethinknet report");
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw SchemaError("unsupported report schema version " + j.at("schema_version").dump());
    }
    ExperimentReport r;
    r.kind = j.at("kind").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.config = j.at("config");
    r.iterations = j.at("iterations").get<std::size_t>();
    r.arms = j.at("arms").get<std::vector<std::string>>();
    for (const json& x : j.at("runs")) {
      RunRecord run;
      run.arm = x.at("arm").get<std::string>();
      run.seed = x.at("seed").get<std::uint64_t>();
      run.diverged = x.at("diverged").get<bool>();
      run.error = x.at("error").get<std::string>();
      run.l2_strength = number(x.at("l2_strength"));
      run.epochs = x.at("epochs").get<std::size_t>();
      run.parameter_count = x.at("parameter_count").get<std::size_t>();
      run.train = series_from_json(x.at("train"));
      run.test = series_from_json(x.at("test"));
      r.runs.push_back(std::move(run));
    }
    for (const json& x : j.at("summaries")) {
      ArmSummary s;
      s.arm = x.at("arm").get<std::string>();
      s.parameter_count = x.at("parameter_count").get<std::size_t>();
      s.seeds = x.at("seeds").get<std::vector<std::uint64_t>>();
      s.train = aggregates_from_json(x.at("train"));
      s.test = aggregates_from_json(x.at("test"));
      s.train_curve = series_from_json(x.at("train_curve"));
      s.test_curve = series_from_json(x.at("test_curve"));
      r.summaries.push_back(std::move(s));
    }
    for (const json& x : j.at("comparisons")) {
      Comparison c;
      c.criterion = x.at("criterion").get<std::string>();
      c.arm_a = x.at("arm_a").get<std::string>();
      c.arm_b = x.at("arm_b").get<std::string>();
      c.result.statistic = number(x.at("statistic"));
      c.result.p_value = number(x.at("p_value"));
      c.result.verdict = parse_verdict(x.at("verdict").get<std::string>());
      c.result.mean_difference = number(x.at("mean_difference"));
      c.result.n = x.at("n").get<std::size_t>();
      r.comparisons.push_back(std::move(c));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("timing")) {
      const json& runs = j["timing"].at("runs");
      if (runs.size() != r.runs.size()) throw SchemaError("timing entries do not match runs");
      for (std::size_t i = 0; i < runs.size(); ++i) r.runs[i].seconds = number(runs[i].at("seconds"));
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad report: ") + e.what());
  }
}

std::string format_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "arm,seed,criterion,t,train,test\n";
  for (const RunRecord& run : r.runs) {
    if (run.diverged) continue;
    for (const auto& [criterion, test] : run.test) {
      const auto& train = run.train.at(criterion);
      for (std::size_t t = 0; t < test.size(); ++t) {
        os << csv_field(run.arm) << ',' << run.seed << ',' << criterion << ',' << t + 1 << ','
           << shortest(train[t]) << ',' << shortest(test[t]) << '\n';
      }
    }
  }
  return os.str();
}

std::string format_markdown(const ExperimentReport& r) {
  std::ostringstream os;
  os << "# " << r.kind << ": " << r.dataset << "\n\n";
  std::size_t completed = 0;
  for (const RunRecord& run : r.runs) completed += run.diverged ? 0 : 1;
  os << completed << " of " << r.runs.size() << " runs completed; mean ± standard error at the last iteration.\n\n";
  os << "## Test\n\n";
  markdown_table(os, r, true);
  os << "\n## Train\n\n";
  markdown_table(os, r, false);
  if (!r.comparisons.empty()) {
    os << "\n## Paired t-tests\n\n| criterion | a | b | mean a - b | t | p | verdict |\n|---|---|---|---|---|---|---|\n";
    for (const Comparison& c : r.comparisons) {
      os << "| " << c.criterion << " | " << c.arm_a << " | " << c.arm_b << " | " << fixed(c.result.mean_difference)
         << " | " << fixed(c.result.statistic) << " | " << fixed(c.result.p_value) << " | "
         << to_string(c.result.verdict) << " |\n";
    }
    const Tally t = tally(r.comparisons);
    os << "\nwin/tie/loss: " << t.win << '/' << t.tie << '/' << t.loss << '\n';
  }
  if (!r.warnings.empty()) {
    os << "\n## Warnings\n\n";
    for (const std::string& w : r.warnings) os << "- " << w << '\n';
  }
  return os.str();
}

std::string format_report(const ExperimentReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return to_json(r).dump(2) + "\n";
    case ReportFormat::Csv: return format_csv(r);
    case ReportFormat::Markdown: return format_markdown(r);
  }
  return {};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void emit_report(const ExperimentReport& r, ReportFormat format, const std::filesystem::path& path) {
  write_file_atomic(path, format_report(r, format));
}

json to_json(const CorrelationAnalysis& a) {
  auto matrix = [](const Tensor& t) {
    json rows = json::array();
    for (std::size_t i = 0; i < t.rows(); ++i) {
      std::vector<double> row(t.cols());
      for (std::size_t c = 0; c < t.cols(); ++c) row[c] = t(i, c);
      rows.push_back(row);
    }
    return rows;
  };
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < a.unnormalized.size(); ++i) {
    if (a.unnormalized[i]) flagged.push_back(i);
  }
  return {{"labels", a.label_names},
          {"memory", matrix(a.memory)},
          {"unnormalized_rows", flagged},
          {"label_correlation", matrix(a.label_correlation)},
          {"off_diagonal_agreement", a.off_diagonal_agreement}};
}

}  // namespace rethink
