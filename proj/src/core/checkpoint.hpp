#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/tensor.hpp"

namespace regpomdp {

struct NamedParam {
  std::string name;
  Tensor tensor;
};

// Checkpoints are a JSON manifest (<base>.json) plus a little-endian binary
// file (<base>.bin) holding one raw float64 blob per parameter at the offset
// recorded in the manifest.
void save_checkpoint(const std::string& base_path, const std::vector<NamedParam>& params,
                     const nlohmann::json& meta);

// Loads into existing tensors, matched by name; shapes must agree.
// Returns the manifest's meta block.
nlohmann::json load_checkpoint(const std::string& base_path, std::vector<NamedParam>& params);

// Reads just the meta block.
nlohmann::json read_checkpoint_meta(const std::string& base_path);

}  // namespace regpomdp
