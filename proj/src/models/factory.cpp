#include "models/factory.hpp"

#include <stdexcept>

namespace regpomdp::models {

std::unique_ptr<SeqModel> build_model(const ModelSpec& spec, int input_size, Rng& rng) {
  if (spec.kind == "lstm") return std::make_unique<Lstm>(spec.lstm, input_size, rng);
  if (spec.kind == "gpt") return std::make_unique<Gpt>(spec.gpt, input_size, rng);
  if (spec.kind == "lru") return std::make_unique<Lru>(spec.lru, input_size, rng);
  throw std::invalid_argument("unknown model kind '" + spec.kind + "'");
}

nlohmann::json model_spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind;
  if (spec.kind == "lstm") {
    j["hidden"] = spec.lstm.hidden;
    j["layers"] = spec.lstm.layers;
  } else if (spec.kind == "gpt") {
    j["hidden"] = spec.gpt.hidden;
    j["heads"] = spec.gpt.heads;
    j["layers"] = spec.gpt.layers;
    j["max_positions"] = spec.gpt.max_positions;
    j["mlp_mult"] = spec.gpt.mlp_mult;
  } else if (spec.kind == "lru") {
    j["hidden"] = spec.lru.hidden;
    j["layers"] = spec.lru.layers;
    j["r_min"] = spec.lru.r_min;
    j["r_max"] = spec.lru.r_max;
    j["theta_max"] = spec.lru.theta_max;
  } else {
    throw std::invalid_argument("unknown model kind '" + spec.kind + "'");
  }
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  if (spec.kind == "lstm") {
    spec.lstm.hidden = j.at("hidden").get<int>();
    spec.lstm.layers = j.at("layers").get<int>();
  } else if (spec.kind == "gpt") {
    spec.gpt.hidden = j.at("hidden").get<int>();
    spec.gpt.heads = j.at("heads").get<int>();
    spec.gpt.layers = j.at("layers").get<int>();
    spec.gpt.max_positions = j.at("max_positions").get<int>();
    if (j.contains("mlp_mult")) spec.gpt.mlp_mult = j.at("mlp_mult").get<int>();
  } else if (spec.kind == "lru") {
    spec.lru.hidden = j.at("hidden").get<int>();
    spec.lru.layers = j.at("layers").get<int>();
    if (j.contains("r_min")) spec.lru.r_min = j.at("r_min").get<double>();
    if (j.contains("r_max")) spec.lru.r_max = j.at("r_max").get<double>();
    if (j.contains("theta_max")) spec.lru.theta_max = j.at("theta_max").get<double>();
  } else {
    throw std::invalid_argument("unknown model kind '" + spec.kind + "'");
  }
  return spec;
}

}  // namespace regpomdp::models
