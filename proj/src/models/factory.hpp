#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "models/gpt.hpp"
#include "models/lru.hpp"
#include "models/lstm.hpp"

namespace regpomdp::models {

struct ModelSpec {
  std::string kind = "lstm";  // "lstm" | "gpt" | "lru"
  LstmConfig lstm;
  GptConfig gpt;
  LruConfig lru;
};

std::unique_ptr<SeqModel> build_model(const ModelSpec& spec, int input_size, Rng& rng);

nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace regpomdp::models
