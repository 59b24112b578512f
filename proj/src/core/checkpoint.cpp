#include "core/checkpoint.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace regpomdp {

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& base_path, const std::vector<NamedParam>& params,
                     const nlohmann::json& meta) {
  nlohmann::json manifest;
  manifest["version"] = kCheckpointVersion;
  manifest["dtype"] = "float64";
  manifest["byte_order"] = "little";
  manifest["meta"] = meta;

  std::ofstream bin(base_path + ".bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("cannot open " + base_path + ".bin for writing");
  nlohmann::json entries = nlohmann::json::array();
  int64_t offset = 0;
  for (const NamedParam& p : params) {
    nlohmann::json e;
    e["name"] = p.name;
    e["shape"] = p.tensor.shape();
    e["offset"] = offset;
    e["nbytes"] = p.tensor.numel() * static_cast<int64_t>(sizeof(double));
    entries.push_back(e);
    bin.write(reinterpret_cast<const char*>(p.tensor.data()),
              static_cast<std::streamsize>(p.tensor.numel() * sizeof(double)));
    offset += p.tensor.numel() * static_cast<int64_t>(sizeof(double));
  }
  bin.close();
  manifest["params"] = entries;

  std::ofstream out(base_path + ".json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + base_path + ".json for writing");
  out << manifest.dump(2) << "\n";
}

nlohmann::json load_checkpoint(const std::string& base_path, std::vector<NamedParam>& params) {
  std::ifstream in(base_path + ".json");
  if (!in) throw std::runtime_error("cannot open checkpoint manifest " + base_path + ".json");
  nlohmann::json manifest = nlohmann::json::parse(in);
  if (manifest.at("dtype") != "float64") throw std::runtime_error("unsupported checkpoint dtype");

  std::unordered_map<std::string, nlohmann::json> by_name;
  for (const auto& e : manifest.at("params")) by_name[e.at("name").get<std::string>()] = e;

  std::ifstream bin(base_path + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open checkpoint data " + base_path + ".bin");
  for (NamedParam& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw std::runtime_error("checkpoint missing parameter '" + p.name + "'");
    Shape shape = it->second.at("shape").get<Shape>();
    if (shape != p.tensor.shape()) {
      throw std::runtime_error("checkpoint shape mismatch for '" + p.name + "': " + shape_str(shape) + " vs " +
                               shape_str(p.tensor.shape()));
    }
    bin.seekg(it->second.at("offset").get<int64_t>());
    bin.read(reinterpret_cast<char*>(p.tensor.data()),
             static_cast<std::streamsize>(p.tensor.numel() * sizeof(double)));
    if (!bin) throw std::runtime_error("truncated checkpoint data for '" + p.name + "'");
  }
  return manifest.at("meta");
}

nlohmann::json read_checkpoint_meta(const std::string& base_path) {
  std::ifstream in(base_path + ".json");
  if (!in) throw std::runtime_error("cannot open checkpoint manifest " + base_path + ".json");
  nlohmann::json manifest = nlohmann::json::parse(in);
  return manifest.at("meta");
}

}  // namespace regpomdp
