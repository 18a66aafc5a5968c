#include "cimsim/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cimsim {

namespace fs = std::filesystem;

namespace {

int get_int(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  if (!j[key].is_number_integer())
    throw ParseError(where + ": field '" + key + "' must be an integer");
  return j[key].get<int>();
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

}  // namespace

Json network_to_json(const NetworkSpec& net) {
  Json j;
  j["name"] = net.name;
  j["layers"] = Json::array();
  for (const auto& l : net.layers) {
    Json e;
    if (l.kind == LayerKind::conv) {
      e["kind"] = "conv";
      e["kh"] = l.kh;
      e["kw"] = l.kw;
      e["cin"] = l.cin;
      e["cout"] = l.cout;
      e["stride"] = l.stride;
      e["pad"] = l.pad;
      e["h"] = l.in_h;
      e["w"] = l.in_w;
    } else {
      e["kind"] = "fc";
      e["in"] = l.in_features;
      e["out"] = l.out_features;
    }
    j["layers"].push_back(std::move(e));
  }
  return j;
}

NetworkSpec network_from_json(const Json& j) {
  NetworkSpec net;
  if (!j.contains("name") || !j["name"].is_string())
    throw ParseError("network: missing string field 'name'");
  net.name = j["name"].get<std::string>();
  if (!j.contains("layers") || !j["layers"].is_array())
    throw ParseError("network: missing array field 'layers'");
  int idx = 0;
  for (const auto& e : j["layers"]) {
    const std::string where = "network layer " + std::to_string(idx);
    if (!e.contains("kind") || !e["kind"].is_string())
      throw ParseError(where + ": missing 'kind'");
    std::string kind = e["kind"].get<std::string>();
    LayerSpec l;
    if (kind == "conv") {
      l.kind = LayerKind::conv;
      l.kh = get_int(e, "kh", where);
      l.kw = get_int(e, "kw", where);
      l.cin = get_int(e, "cin", where);
      l.cout = get_int(e, "cout", where);
      l.stride = get_int(e, "stride", where);
      l.pad = get_int(e, "pad", where);
      l.in_h = get_int(e, "h", where);
      l.in_w = get_int(e, "w", where);
    } else if (kind == "fc") {
      l.kind = LayerKind::fc;
      l.in_features = get_int(e, "in", where);
      l.out_features = get_int(e, "out", where);
    } else {
      throw ParseError(where + ": unknown kind '" + kind + "'");
    }
    net.layers.push_back(l);
    ++idx;
  }
  net.validate();
  return net;
}

NetworkSpec load_network(const std::string& path) {
  return network_from_json(load_json_file(path));
}

ActivationTrace load_trace(const std::string& manifest_path,
                           const NetworkSpec& net) {
  Json j = load_json_file(manifest_path);
  if (!j.contains("images") || !j["images"].is_number_integer())
    throw ParseError("trace manifest: missing integer field 'images'");
  if (!j.contains("layers") || !j["layers"].is_array())
    throw ParseError("trace manifest: missing array field 'layers'");

  ActivationTrace trace;
  trace.images = j["images"].get<int64_t>();
  size_t n_layers = net.layers.size();
  if (j["layers"].size() != n_layers)
    throw ValidationError("trace manifest lists " +
                          std::to_string(j["layers"].size()) +
                          " layers, network has " + std::to_string(n_layers));
  trace.layer_inputs.resize(n_layers);
  std::vector<bool> seen(n_layers, false);

  fs::path base = fs::path(manifest_path).parent_path();
  for (const auto& e : j["layers"]) {
    int layer = get_int(e, "layer", "trace manifest entry");
    if (layer < 0 || static_cast<size_t>(layer) >= n_layers)
      throw ValidationError("trace manifest: layer index " +
                            std::to_string(layer) + " out of range");
    if (seen[static_cast<size_t>(layer)])
      throw ValidationError("trace manifest: duplicate layer " +
                            std::to_string(layer));
    seen[static_cast<size_t>(layer)] = true;
    if (!e.contains("shape") || !e["shape"].is_array())
      throw ParseError("trace manifest: entry missing 'shape'");
    if (!e.contains("file") || !e["file"].is_string())
      throw ParseError("trace manifest: entry missing 'file'");

    Tensor t;
    for (const auto& d : e["shape"]) t.shape.push_back(d.get<int64_t>());
    std::string file = (base / e["file"].get<std::string>()).string();
    t.data = read_file_bytes(file);
    if (static_cast<int64_t>(t.data.size()) != t.elems())
      throw ValidationError("trace layer " + std::to_string(layer) + ": blob " +
                            file + " has " + std::to_string(t.data.size()) +
                            " bytes, shape requires " +
                            std::to_string(t.elems()));
    trace.layer_inputs[static_cast<size_t>(layer)] = std::move(t);
  }
  trace.validate(net);
  return trace;
}

Json write_trace(const ActivationTrace& trace, const NetworkSpec& net,
                 const std::string& manifest_path, const Json& meta) {
  trace.validate(net);
  fs::path manifest(manifest_path);
  fs::path base = manifest.parent_path();
  if (!base.empty()) fs::create_directories(base);
  std::string stem = manifest.stem().string();

  Json j;
  j["images"] = trace.images;
  j["layers"] = Json::array();
  for (size_t i = 0; i < trace.layer_inputs.size(); ++i) {
    const Tensor& t = trace.layer_inputs[i];
    std::string blob_name = stem + "_layer_" + std::to_string(i) + ".bin";
    {
      std::string tmp = (base / (blob_name + ".tmp")).string();
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw ParseError("cannot write blob: " + tmp);
      out.write(reinterpret_cast<const char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size()));
      out.close();
      fs::rename(tmp, base / blob_name);
    }
    Json e;
    e["layer"] = static_cast<int>(i);
    e["shape"] = t.shape;
    e["file"] = blob_name;
    j["layers"].push_back(std::move(e));
  }
  if (!meta.is_null()) j["meta"] = meta;
  save_json_atomic(manifest_path, j);
  return j;
}

Json array_config_to_json(const ArrayConfig& c) {
  Json j;
  j["array_rows"] = c.array_rows;
  j["array_cols"] = c.array_cols;
  j["adc_bits"] = c.adc_bits;
  j["cols_per_adc"] = c.cols_per_adc;
  j["input_bits"] = c.input_bits;
  j["weight_bits"] = c.weight_bits;
  j["arrays_per_pe"] = c.arrays_per_pe;
  j["min_read_per_plane"] = c.min_read_per_plane;
  j["clock_hz"] = c.clock_hz;
  return j;
}

Json chip_config_to_json(const ChipConfig& c) {
  Json j;
  j["pe_count"] = c.pe_count;
  j["allocation_policy"] = to_string(c.allocation_policy);
  j["dataflow"] = to_string(c.dataflow);
  j["interlayer_buffer_images"] = c.interlayer_buffer_images;
  j["pipeline_images"] = c.pipeline_images;
  j["warmup_images"] = c.warmup_images;
  j["mode"] = to_string(c.mode);
  j["sim_mode"] = to_string(c.sim_mode);
  j["fill_remainder"] = c.fill_remainder;
  j["psum_pipelined"] = c.psum_pipelined;
  return j;
}

Json config_to_json(const ConfigBundle& c) {
  Json j;
  j["array"] = array_config_to_json(c.array);
  j["chip"] = chip_config_to_json(c.chip);
  j["seed"] = c.seed;
  return j;
}

namespace {
template <typename T>
void maybe(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}
}  // namespace

ArrayConfig array_config_from_json(const Json& j) {
  ArrayConfig c;
  maybe(j, "array_rows", c.array_rows);
  maybe(j, "array_cols", c.array_cols);
  maybe(j, "adc_bits", c.adc_bits);
  maybe(j, "cols_per_adc", c.cols_per_adc);
  maybe(j, "input_bits", c.input_bits);
  maybe(j, "weight_bits", c.weight_bits);
  maybe(j, "arrays_per_pe", c.arrays_per_pe);
  maybe(j, "min_read_per_plane", c.min_read_per_plane);
  maybe(j, "clock_hz", c.clock_hz);
  c.validate();
  return c;
}

ChipConfig chip_config_from_json(const Json& j) {
  ChipConfig c;
  maybe(j, "pe_count", c.pe_count);
  if (j.contains("allocation_policy"))
    c.allocation_policy =
        alloc_policy_from_string(j["allocation_policy"].get<std::string>());
  if (j.contains("dataflow"))
    c.dataflow = dataflow_from_string(j["dataflow"].get<std::string>());
  maybe(j, "interlayer_buffer_images", c.interlayer_buffer_images);
  maybe(j, "pipeline_images", c.pipeline_images);
  maybe(j, "warmup_images", c.warmup_images);
  if (j.contains("mode"))
    c.mode = scan_mode_from_string(j["mode"].get<std::string>());
  if (j.contains("sim_mode"))
    c.sim_mode = sim_mode_from_string(j["sim_mode"].get<std::string>());
  maybe(j, "fill_remainder", c.fill_remainder);
  maybe(j, "psum_pipelined", c.psum_pipelined);
  c.validate();
  return c;
}

ConfigBundle config_from_json(const Json& j) {
  ConfigBundle c;
  if (j.contains("array")) c.array = array_config_from_json(j["array"]);
  if (j.contains("chip")) c.chip = chip_config_from_json(j["chip"]);
  maybe(j, "seed", c.seed);
  return c;
}

ConfigBundle load_config(const std::string& path) {
  return config_from_json(load_json_file(path));
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON in " + path);
  return j;
}

void save_text_atomic(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write file: " + tmp);
    out << text;
  }
  fs::rename(tmp, path);
}

void save_json_atomic(const std::string& path, const Json& j) {
  save_text_atomic(path, j.dump(2) + "\n");
}

std::string file_hash_hex(const std::string& path) {
  auto bytes = read_file_bytes(path);
  return to_hex(fnv1a64(bytes.data(), bytes.size()));
}

}  // namespace cimsim
