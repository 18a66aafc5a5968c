#pragma once

#include <string>

#include <json.hpp>

#include "cimsim/model.hpp"

namespace cimsim {

// Key order in emitted files is fixed so that identical runs produce
// byte-identical outputs.
using Json = nlohmann::ordered_json;

Json network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const Json& j);
NetworkSpec load_network(const std::string& path);

// Trace manifest schema:
//   { "images": N, "layers": [ {"layer": i, "shape": [...], "file": "x.bin"} ] }
// Blobs are raw u8, row-major. shape[0] is the image count.
ActivationTrace load_trace(const std::string& manifest_path,
                           const NetworkSpec& net);
// Writes manifest_path plus one <stem>_layer_<i>.bin blob per layer next to
// it. Returns the manifest json (including a "meta" block loaders ignore).
Json write_trace(const ActivationTrace& trace, const NetworkSpec& net,
                 const std::string& manifest_path, const Json& meta = Json());

struct ConfigBundle {
  ArrayConfig array;
  ChipConfig chip;
  uint64_t seed = 1;
};

Json array_config_to_json(const ArrayConfig& c);
Json chip_config_to_json(const ChipConfig& c);
Json config_to_json(const ConfigBundle& c);
ArrayConfig array_config_from_json(const Json& j);
ChipConfig chip_config_from_json(const Json& j);
ConfigBundle config_from_json(const Json& j);
ConfigBundle load_config(const std::string& path);

Json load_json_file(const std::string& path);
// Write-to-temp-then-rename so sweep workers never expose partial files.
void save_text_atomic(const std::string& path, const std::string& text);
void save_json_atomic(const std::string& path, const Json& j);

std::string file_hash_hex(const std::string& path);

}  // namespace cimsim
