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

#include "rethink/json_io.hpp"

#include <string>

namespace rethink {

using nlohmann::json;

json to_json(const ModelConfig& c) {
  return {{"cell", to_string(c.cell)},
          {"hidden_dim", c.hidden_dim},
          {"rethink_iterations", c.rethink_iterations},
          {"recurrent_dropout", c.recurrent_dropout},
          {"l2_strength", c.l2_strength},
          {"cost", c.cost.name()},
          {"reweighted", c.reweighted},
          {"weight_normalization", c.weight_normalization == WeightNormalization::Raw ? "raw" : "mean_one"},
          {"identity_dense", c.identity_dense},
          {"seed", c.seed},
          {"optimizer",
           {{"learning_rate", c.optimizer.learning_rate},
            {"beta1", c.optimizer.beta1},
            {"beta2", c.optimizer.beta2},
            {"epsilon", c.optimizer.epsilon},
            {"nesterov", c.optimizer.nesterov}}}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.cell = parse_cell_kind(j.at("cell").get<std::string>());
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.rethink_iterations = j.at("rethink_iterations").get<std::size_t>();
  c.recurrent_dropout = j.at("recurrent_dropout").get<double>();
  c.l2_strength = j.at("l2_strength").get<double>();
  c.cost = CostFunction::parse(j.at("cost").get<std::string>());
  c.reweighted = j.at("reweighted").get<bool>();
  c.weight_normalization =
      j.at("weight_normalization").get<std::string>() == "raw" ? WeightNormalization::Raw : WeightNormalization::MeanOne;
  c.identity_dense = j.value("identity_dense", false);
  c.seed = j.at("seed").get<std::uint64_t>();
  const json& o = j.at("optimizer");
  c.optimizer.learning_rate = o.at("learning_rate").get<double>();
  c.optimizer.beta1 = o.at("beta1").get<double>();
  c.optimizer.beta2 = o.at("beta2").get<double>();
  c.optimizer.epsilon = o.at("epsilon").get<double>();
  c.optimizer.nesterov = o.at("nesterov").get<bool>();
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"max_epochs", c.max_epochs}, {"batch_size", c.batch_size}, {"patience", c.patience}, {"min_delta", c.min_delta}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.min_delta = j.at("min_delta").get<double>();
  return c;
}

}  // namespace rethink
