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

#include "rethink/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <system_error>

#include "rethink/error.hpp"

namespace rethink {

// ---------------------------------------------------------------------------
// Dataset

void Dataset::validate() const {
  const std::size_t n = features.rows();
  if (n == 0) throw SizeError("dataset has no examples");
  if (features.cols() == 0) throw SizeError("dataset has no features");
  if (labels.size() != n) {
    throw DimensionError("dataset has " + std::to_string(n) + " feature rows but " +
                         std::to_string(labels.size()) + " label vectors");
  }
  const std::size_t k = labels.front().size();
  if (k == 0) throw SizeError("dataset has no labels");
  for (const auto& y : labels) {
    if (y.size() != k) throw DimensionError("label vectors differ in length");
  }
  if (!features.all_finite()) throw ParseError("non-finite feature value", 0);
}

Tensor Dataset::label_matrix() const {
  Tensor y(labels.size(), n_labels());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    for (std::size_t k = 0; k < labels[n].size(); ++k) y(n, k) = labels[n][k] ? 1.0 : 0.0;
  }
  return y;
}

Dataset Dataset::subset(const std::vector<std::size_t>& idx) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.label_names = label_names;
  out.features = Tensor(idx.size(), n_features());
  out.labels.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.features.mat().row(static_cast<Eigen::Index>(i)) =
        features.mat().row(static_cast<Eigen::Index>(idx[i]));
    out.labels.push_back(labels.at(idx[i]));
  }
  return out;
}

DatasetStats stats(const Dataset& ds) {
  DatasetStats s;
  s.n_examples = ds.n_examples();
  s.n_features = ds.n_features();
  s.n_labels = ds.n_labels();
  if (s.n_examples == 0 || s.n_labels == 0) return s;
  std::size_t relevant = 0;
  for (const auto& y : ds.labels) relevant += y.count();
  s.cardinality = static_cast<double>(relevant) / static_cast<double>(s.n_examples);
  s.density = s.cardinality / static_cast<double>(s.n_labels);
  return s;
}

// ---------------------------------------------------------------------------
// Text helpers

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_double(std::string_view tok, double& out) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

bool parse_index(std::string_view tok, std::size_t& out) {
  tok = trim(tok);
  if (tok.empty()) return false;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) ++i;
      out.push_back(s[i]);
    }
    return out;
  }
  return std::string(s);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

// ---------------------------------------------------------------------------
// ARFF

struct Attribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> values;  // nominal values in declared order

  // Numeric value of a data token.
  bool decode(std::string_view tok, double& out) const {
    if (!nominal) return parse_double(tok, out);
    const std::string v = unquote(tok);
    // {0,1} in either order maps by value, other two-valued domains by index.
    if ((values[0] == "0" || values[0] == "1") && (values.size() == 1 || values[1] == "0" || values[1] == "1")) {
      if (v == "0") { out = 0.0; return true; }
      if (v == "1") { out = 1.0; return true; }
      return false;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == v) { out = static_cast<double>(i); return true; }
    }
    return false;
  }
};

// Splits "@attribute <name> <type>" into name and type text.
std::pair<std::string, std::string_view> split_attribute(std::string_view rest) {
  rest = trim(rest);
  if (rest.empty()) return {};
  if (rest.front() == '\'' || rest.front() == '"') {
    const char q = rest.front();
    std::size_t i = 1;
    for (; i < rest.size(); ++i) {
      if (rest[i] == '\\') { ++i; continue; }
      if (rest[i] == q) break;
    }
    if (i >= rest.size()) return {};
    return {unquote(rest.substr(0, i + 1)), trim(rest.substr(i + 1))};
  }
  const auto ws = rest.find_first_of(" \t{");
  if (ws == std::string_view::npos) return {std::string(rest), {}};
  return {std::string(rest.substr(0, ws)), trim(rest.substr(ws))};
}

}  // namespace

LabelSpec LabelSpec::parse(std::string_view text) {
  LabelSpec spec;
  if (text.rfind("last_k:", 0) == 0) {
    spec.kind = Kind::LastK;
    if (!parse_index(text.substr(7), spec.last_k) || spec.last_k == 0) {
      throw ParameterError("invalid label spec '" + std::string(text) + "'");
    }
    return spec;
  }
  spec.kind = Kind::Xml;
  spec.xml_path = std::string(text.rfind("xml:", 0) == 0 ? text.substr(4) : text);
  if (spec.xml_path.empty()) throw ParameterError("empty label spec");
  return spec;
}

std::vector<std::string> parse_mulan_labels(std::string_view xml) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = xml.find("<label", pos)) != std::string_view::npos) {
    const std::size_t after = pos + 6;
    pos = after;
    if (after >= xml.size() || !(std::isspace(static_cast<unsigned char>(xml[after])) || xml[after] == '/')) {
      continue;  // e.g. <labels ...>
    }
    const auto close = xml.find('>', after);
    if (close == std::string_view::npos) throw ParseError("unterminated <label> element", 0);
    std::string_view tag = xml.substr(after, close - after);
    const auto attr = tag.find("name");
    if (attr == std::string_view::npos) throw ParseError("<label> without name attribute", 0);
    const auto q = tag.find_first_of("\"'", attr);
    if (q == std::string_view::npos) throw ParseError("malformed <label> name", 0);
    const auto q2 = tag.find(tag[q], q + 1);
    if (q2 == std::string_view::npos) throw ParseError("malformed <label> name", 0);
    std::string raw(tag.substr(q + 1, q2 - q - 1));
    std::string name;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      static const std::pair<const char*, char> kEntities[] = {
          {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
      bool replaced = false;
      for (const auto& [ent, ch] : kEntities) {
        if (raw.compare(i, std::char_traits<char>::length(ent), ent) == 0) {
          name.push_back(ch);
          i += std::char_traits<char>::length(ent) - 1;
          replaced = true;
          break;
        }
      }
      if (!replaced) name.push_back(raw[i]);
    }
    names.push_back(std::move(name));
    pos = close;
  }
  return names;
}

std::vector<std::string> read_mulan_labels(const std::filesystem::path& xml_path) {
  return parse_mulan_labels(read_file(xml_path));
}

Dataset parse_arff(std::string_view text, const LabelSpec& label_spec, std::string name) {
  std::vector<Attribute> attrs;
  LineReader reader(text);
  std::string_view line;
  bool in_data = false;

  while (!in_data && reader.next(line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    if (t.front() != '@') throw ParseError("expected header directive", reader.line_no());
    const auto ws = t.find_first_of(" \t");
    const std::string directive = lower(t.substr(0, ws));
    const std::string_view rest = ws == std::string_view::npos ? std::string_view{} : t.substr(ws);
    if (directive == "@relation") {
      if (name == "arff") name = unquote(rest);
    } else if (directive == "@attribute") {
      auto [attr_name, type] = split_attribute(rest);
      if (attr_name.empty() || type.empty()) throw ParseError("malformed @attribute", reader.line_no());
      Attribute a;
      a.name = std::move(attr_name);
      if (type.front() == '{') {
        const auto close = type.find('}');
        if (close == std::string_view::npos) throw ParseError("unterminated nominal domain", reader.line_no());
        for (auto v : split_on(type.substr(1, close - 1), ',')) a.values.push_back(unquote(v));
        if (a.values.empty() || a.values.size() > 2) {
          throw ParseError("only binary nominal attributes are supported ('" + a.name + "')", reader.line_no());
        }
        a.nominal = true;
      } else {
        const std::string ty = lower(trim(type));
        if (ty != "numeric" && ty != "real" && ty != "integer") {
          throw ParseError("unsupported attribute type '" + std::string(type) + "'", reader.line_no());
        }
      }
      attrs.push_back(std::move(a));
    } else if (directive == "@data") {
      in_data = true;
    } else {
      throw ParseError("unknown directive " + directive, reader.line_no());
    }
  }
  if (!in_data) throw ParseError("missing @data section", reader.line_no());
  if (attrs.empty()) throw ParseError("no attributes declared", 0);

  // Resolve label columns.
  std::vector<std::size_t> label_cols;
  if (label_spec.kind == LabelSpec::Kind::LastK) {
    if (label_spec.last_k == 0 || label_spec.last_k >= attrs.size()) {
      throw SchemaError("last_k:" + std::to_string(label_spec.last_k) + " leaves no features among " +
                        std::to_string(attrs.size()) + " attributes");
    }
    for (std::size_t i = attrs.size() - label_spec.last_k; i < attrs.size(); ++i) label_cols.push_back(i);
  } else {
    std::map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < attrs.size(); ++i) by_name.emplace(attrs[i].name, i);
    for (const auto& ln : read_mulan_labels(label_spec.xml_path)) {
      const auto it = by_name.find(ln);
      if (it == by_name.end()) throw SchemaError("label '" + ln + "' is not an attribute");
      label_cols.push_back(it->second);
    }
    if (label_cols.empty()) throw SchemaError("label file names no labels");
  }
  std::vector<int> role(attrs.size(), -1);  // -1 feature, else label index
  for (std::size_t k = 0; k < label_cols.size(); ++k) {
    if (role[label_cols[k]] != -1) throw SchemaError("label '" + attrs[label_cols[k]].name + "' listed twice");
    role[label_cols[k]] = static_cast<int>(k);
  }
  std::vector<std::size_t> feature_pos(attrs.size(), 0);
  Dataset ds;
  ds.name = std::move(name);
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (role[i] == -1) {
      feature_pos[i] = ds.feature_names.size();
      ds.feature_names.push_back(attrs[i].name);
    }
  }
  for (auto c : label_cols) ds.label_names.push_back(attrs[c].name);
  const std::size_t d = ds.feature_names.size();
  const std::size_t k = label_cols.size();

  std::vector<double> feats;
  std::vector<LabelVector> labels;
  std::vector<double> row(attrs.size());

  auto store = [&](std::size_t line_no) {
    LabelVector y(k);
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (role[i] == -1) continue;
      if (row[i] != 0.0 && row[i] != 1.0) {
        throw ParseError("label '" + attrs[i].name + "' is not 0/1", line_no);
      }
      y.set(static_cast<std::size_t>(role[i]), row[i] == 1.0);
    }
    const std::size_t base = feats.size();
    feats.resize(base + d);
    for (std::size_t i = 0; i < attrs.size(); ++i) {
      if (role[i] == -1) feats[base + feature_pos[i]] = row[i];
    }
    labels.push_back(std::move(y));
  };

  while (reader.next(line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    const std::size_t ln = reader.line_no();
    std::fill(row.begin(), row.end(), 0.0);
    if (t.front() == '{') {
      if (t.back() != '}') throw ParseError("unterminated sparse row", ln);
      const auto body = trim(t.substr(1, t.size() - 2));
      if (!body.empty()) {
        for (auto entry : split_on(body, ',')) {
          entry = trim(entry);
          const auto sp = entry.find_first_of(" \t");
          std::size_t idx = 0;
          if (sp == std::string_view::npos || !parse_index(entry.substr(0, sp), idx)) {
            throw ParseError("malformed sparse entry '" + std::string(entry) + "'", ln);
          }
          if (idx >= attrs.size()) throw ParseError("sparse index " + std::to_string(idx) + " out of range", ln);
          const auto val = trim(entry.substr(sp));
          if (val == "?") throw ParseError("missing values are not supported", ln);
          if (!attrs[idx].decode(val, row[idx])) {
            throw ParseError("bad value '" + std::string(val) + "' for '" + attrs[idx].name + "'", ln);
          }
        }
      }
    } else {
      const auto toks = split_on(t, ',');
      if (toks.size() != attrs.size()) {
        throw ParseError("expected " + std::to_string(attrs.size()) + " values, got " +
                             std::to_string(toks.size()), ln);
      }
      for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto val = trim(toks[i]);
        if (val == "?") throw ParseError("missing values are not supported", ln);
        if (!attrs[i].decode(val, row[i])) {
          throw ParseError("bad value '" + std::string(val) + "' for '" + attrs[i].name + "'", ln);
        }
      }
    }
    store(ln);
  }

  const std::size_t n = labels.size();
  if (n == 0) throw ParseError("no data rows", reader.line_no());
  ds.features = Tensor(n, d);
  std::copy(feats.begin(), feats.end(), ds.features.values().begin());
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

Dataset load_arff(const std::filesystem::path& path, const LabelSpec& labels) {
  return parse_arff(read_file(path), labels, path.stem().string());
}

// ---------------------------------------------------------------------------
// Native format

Dataset parse_native(std::string_view text, std::string name) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw ParseError("empty file", 1);
  std::istringstream head{std::string(trim(line))};
  std::size_t n = 0, d = 0, k = 0;
  std::string extra;
  if (!(head >> n >> d >> k) || (head >> extra)) throw ParseError("header must be 'N d K'", 1);
  if (n == 0 || d == 0 || k == 0) throw ParseError("N, d and K must be positive", 1);

  Dataset ds;
  ds.name = std::move(name);
  ds.features = Tensor(n, d);
  ds.labels.reserve(n);
  std::size_t row = 0;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_no();
    if (trim(line).empty() && row == n) continue;
    if (row == n) throw ParseError("more than " + std::to_string(n) + " example lines", ln);
    const auto tab = line.find('\t');
    const auto label_field = trim(line.substr(0, tab));
    const auto feat_field = tab == std::string_view::npos ? std::string_view{} : trim(line.substr(tab + 1));
    LabelVector y(k);
    if (!label_field.empty()) {
      for (auto tok : split_on(label_field, ',')) {
        std::size_t idx = 0;
        if (!parse_index(tok, idx)) throw ParseError("bad label index '" + std::string(tok) + "'", ln);
        if (idx >= k) throw ParseError("label index " + std::to_string(idx) + " >= K", ln);
        y.set(idx, true);
      }
    }
    std::size_t pos = 0;
    while (pos < feat_field.size()) {
      auto end = feat_field.find_first_of(" \t", pos);
      if (end == std::string_view::npos) end = feat_field.size();
      const auto pair = feat_field.substr(pos, end - pos);
      pos = end + 1;
      if (pair.empty()) continue;
      const auto colon = pair.find(':');
      std::size_t idx = 0;
      double v = 0.0;
      if (colon == std::string_view::npos || !parse_index(pair.substr(0, colon), idx) ||
          !parse_double(pair.substr(colon + 1), v)) {
        throw ParseError("bad feature entry '" + std::string(pair) + "'", ln);
      }
      if (idx >= d) throw ParseError("feature index " + std::to_string(idx) + " >= d", ln);
      ds.features(row, idx) = v;
    }
    ds.labels.push_back(std::move(y));
    ++row;
  }
  if (row != n) {
    throw ParseError("expected " + std::to_string(n) + " example lines, found " + std::to_string(row),
                     reader.line_no() + 1);
  }
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t j = 0; j < k; ++j) ds.label_names.push_back("l" + std::to_string(j));
  return ds;
}

Dataset load_native(const std::filesystem::path& path) {
  return parse_native(read_file(path), path.stem().string());
}

std::string format_native(const Dataset& ds) {
  ds.validate();
  std::string out = std::to_string(ds.n_examples()) + " " + std::to_string(ds.n_features()) + " " +
                    std::to_string(ds.n_labels()) + "\n";
  char buf[64];
  for (std::size_t n = 0; n < ds.n_examples(); ++n) {
    bool first = true;
    for (std::size_t k = 0; k < ds.n_labels(); ++k) {
      if (!ds.labels[n][k]) continue;
      if (!first) out.push_back(',');
      out += std::to_string(k);
      first = false;
    }
    out.push_back('\t');
    first = true;
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
      const double v = ds.features(n, j);
      if (v == 0.0) continue;
      if (!first) out.push_back(' ');
      out += std::to_string(j);
      out.push_back(':');
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out.append(buf, res.ptr);
      first = false;
    }
    out.push_back('\n');
  }
  return out;
}

void save_native(const Dataset& ds, const std::filesystem::path& path) {
  const std::string text = format_native(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string(), 0);
  out << text;
}

Dataset load_dataset(const std::filesystem::path& path, const LabelSpec& labels) {
  if (lower(path.extension().string()) == ".arff") return load_arff(path, labels);
  return load_native(path);
}

// ---------------------------------------------------------------------------
// Scaling and splitting

ScalingParams fit_scaling(const Tensor& features) {
  ScalingParams p;
  const auto& m = features.mat();
  p.min.resize(features.cols());
  p.max.resize(features.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    p.min[static_cast<std::size_t>(j)] = m.rows() ? m.col(j).minCoeff() : 0.0;
    p.max[static_cast<std::size_t>(j)] = m.rows() ? m.col(j).maxCoeff() : 0.0;
  }
  return p;
}

Tensor ScalingParams::apply(const Tensor& features) const {
  if (features.cols() != min.size()) {
    throw DimensionError("scaling parameters cover " + std::to_string(min.size()) +
                         " features, data has " + std::to_string(features.cols()));
  }
  Tensor out(features.rows(), features.cols());
  for (std::size_t j = 0; j < features.cols(); ++j) {
    const double range = max[j] - min[j];
    for (std::size_t i = 0; i < features.rows(); ++i) {
      out(i, j) = range > 0.0 ? std::clamp((features(i, j) - min[j]) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

Dataset ScalingParams::apply(const Dataset& ds) const {
  Dataset out = ds;
  out.features = apply(ds.features);
  return out;
}

std::pair<Dataset, ScalingParams> scale_features(const Dataset& ds) {
  ScalingParams p = fit_scaling(ds.features);
  Dataset scaled = p.apply(ds);
  return {std::move(scaled), std::move(p)};
}

Split split(std::size_t n_examples, std::uint64_t seed) {
  if (n_examples < 4) throw SizeError("split needs at least 4 examples, got " + std::to_string(n_examples));
  std::vector<std::size_t> perm(n_examples);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(0.75 * static_cast<double>(n_examples)));
  Split s;
  s.seed = seed;
  s.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(s.train_indices.begin(), s.train_indices.end());
  std::sort(s.test_indices.begin(), s.test_indices.end());
  return s;
}

std::vector<std::vector<std::size_t>> kfold(std::size_t n_examples, std::size_t folds, std::uint64_t seed) {
  if (folds < 2 || n_examples < folds) {
    throw SizeError("k-fold needs 2 <= folds <= N (folds=" + std::to_string(folds) +
                    ", N=" + std::to_string(n_examples) + ")");
  }
  std::vector<std::size_t> perm(n_examples);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < perm.size(); ++i) out[i % folds].push_back(perm[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

}  // namespace rethink
