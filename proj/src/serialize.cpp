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

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "rethink/error.hpp"
#include "rethink/json_io.hpp"
#include "rethink/model.hpp"

namespace rethink {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'R', 'T', 'H', 'K', 'N', 'E', 'T', '1'};
constexpr int kFormatVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (std::size_t i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw SchemaError("model file truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_model(const std::filesystem::path& path, const RethinkNet& model,
                const std::optional<ScalingParams>& scaling) {
  json header;
  header["format"] = "rethinknet-model";
  header["version"] = kFormatVersion;
  header["config"] = to_json(model.config());
  header["input_dim"] = model.input_dim();
  header["n_labels"] = model.n_labels();
  header["history"] = model.history();
  const auto names = RethinkNet::parameter_names();
  const auto params = model.parameters();
  json tensors = json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    tensors.push_back({{"name", names[i]}, {"rows", params[i]->rows()}, {"cols", params[i]->cols()}});
  }
  header["tensors"] = tensors;
  if (scaling) {
    header["scaling"] = {{"min", scaling->min}, {"max", scaling->max}};
  } else {
    header["scaling"] = nullptr;
  }
  const std::string text = header.dump();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const Tensor* p : params) {
      for (double v : p->values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw SchemaError(path.string() + " is not a model file");
  const std::uint64_t len = get_u64(in);
  if (len > (1u << 30)) throw SchemaError("model header too large");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw SchemaError("model file truncated");

  json header;
  try {
    header = json::parse(text);
    if (header.at("format") != "rethinknet-model") throw SchemaError("unknown model format");
    if (header.at("version").get<int>() != kFormatVersion) throw SchemaError("unsupported model version");
    ModelBundle bundle{RethinkNet(model_config_from_json(header.at("config")), header.at("input_dim").get<std::size_t>(),
                                  header.at("n_labels").get<std::size_t>()),
                       std::nullopt};
    const auto params = bundle.model.parameters();
    const json& tensors = header.at("tensors");
    if (tensors.size() != params.size()) throw SchemaError("model tensor count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (tensors[i].at("rows").get<std::size_t>() != params[i]->rows() ||
          tensors[i].at("cols").get<std::size_t>() != params[i]->cols()) {
        throw SchemaError("shape mismatch for tensor " + tensors[i].at("name").get<std::string>());
      }
      for (double& v : params[i]->values()) v = std::bit_cast<double>(get_u64(in));
    }
    bundle.model.set_history(header.at("history").get<std::vector<double>>());
    if (!header.at("scaling").is_null()) {
      ScalingParams s;
      s.min = header["scaling"].at("min").get<std::vector<double>>();
      s.max = header["scaling"].at("max").get<std::vector<double>>();
      if (s.min.size() != bundle.model.input_dim() || s.max.size() != s.min.size()) {
        throw SchemaError("scaling parameters do not match the input dimension");
      }
      bundle.scaling = std::move(s);
    }
    return bundle;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad model header: ") + e.what());
  } catch (const ParameterError& e) {
    throw SchemaError(std::string("bad model config: ") + e.what());
  }
}

}  // namespace rethink
