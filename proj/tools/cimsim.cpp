// cimsim: compute-in-memory crossbar simulator and allocation explorer.
//
// Subcommands: synth, map, profile, allocate, simulate, compare, pipeline
// (plus a hidden verify used by CI). Exit codes: 0 ok, 2 usage, 3 validation,
// 4 capacity, 5 internal.

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cimsim/alloc.hpp"
#include "cimsim/arraysim.hpp"
#include "cimsim/dataflow.hpp"
#include "cimsim/io.hpp"
#include "cimsim/mapping.hpp"
#include "cimsim/model.hpp"
#include "cimsim/oracle.hpp"
#include "cimsim/prng.hpp"
#include "cimsim/report.hpp"
#include "cimsim/stats.hpp"

using namespace cimsim;

namespace {

struct Inputs {
  std::string network_path;
  std::string trace_path;
  std::string config_path;
  NetworkSpec net;
  ActivationTrace trace;
  bool has_trace = false;

  Json hashes() const {
    Json j;
    if (!network_path.empty())
      j["network"] = Json{{"path", network_path},
                          {"fnv64", file_hash_hex(network_path)}};
    if (!trace_path.empty())
      j["trace"] =
          Json{{"path", trace_path}, {"fnv64", file_hash_hex(trace_path)}};
    if (!config_path.empty())
      j["config"] =
          Json{{"path", config_path}, {"fnv64", file_hash_hex(config_path)}};
    return j;
  }
};

// Flag values that override the config file when explicitly given.
struct Overrides {
  int pe_count = 0;
  std::string policy, dataflow, mode, sim_mode;
  int64_t images = -1, warmup = -1;
  int buffer = -1;
  bool fill_remainder = false, psum_pipelined = false;
  uint64_t seed = 0;

  void bind(CLI::App* cmd) {
    cmd->add_option("--pe_count", pe_count, "PE count");
    cmd->add_option("--allocation_policy,--policy", policy,
                    "weight|perf_layer|block");
    cmd->add_option("--dataflow", dataflow, "layerwise|blockwise");
    cmd->add_option("--mode", mode, "zeroskip|baseline");
    cmd->add_option("--sim_mode", sim_mode, "functional|timing");
    cmd->add_option("--images", images, "images to stream");
    cmd->add_option("--warmup", warmup, "warm-up images excluded from counters");
    cmd->add_option("--interlayer_buffer_images,--buffer", buffer,
                    "inter-layer image buffer capacity");
    cmd->add_flag("--fill_remainder", fill_remainder,
                  "greedy keeps filling with cheaper units");
    cmd->add_flag("--psum_pipelined", psum_pipelined,
                  "relax the per-patch barrier in layerwise mode");
    cmd->add_option("--seed", seed, "run seed");
  }

  void apply(const CLI::App* cmd, ConfigBundle& cfg) const {
    if (cmd->count("--pe_count")) cfg.chip.pe_count = pe_count;
    if (cmd->count("--allocation_policy"))
      cfg.chip.allocation_policy = alloc_policy_from_string(policy);
    if (cmd->count("--dataflow"))
      cfg.chip.dataflow = dataflow_from_string(dataflow);
    if (cmd->count("--mode")) cfg.chip.mode = scan_mode_from_string(mode);
    if (cmd->count("--sim_mode"))
      cfg.chip.sim_mode = sim_mode_from_string(sim_mode);
    if (cmd->count("--images")) cfg.chip.pipeline_images = images;
    if (cmd->count("--warmup")) cfg.chip.warmup_images = warmup;
    if (cmd->count("--interlayer_buffer_images"))
      cfg.chip.interlayer_buffer_images = buffer;
    if (cmd->count("--fill_remainder")) cfg.chip.fill_remainder = true;
    if (cmd->count("--psum_pipelined")) cfg.chip.psum_pipelined = true;
    if (cmd->count("--seed")) cfg.seed = seed;
  }
};

ConfigBundle load_bundle(const std::string& config_path) {
  return config_path.empty() ? ConfigBundle{} : load_config(config_path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void emit(const std::string& out_path, const Json& j) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    save_json_atomic(out_path, j);
}

// ---------------------------------------------------------------------------
// One simulation point: allocate under the configured policy, then simulate.

struct PointResult {
  SimReport report;
  Allocation allocation;
};

PointResult run_point(const NetworkSpec& net, const ActivationTrace& trace,
                      const ConfigBundle& cfg, const CostModel* cost,
                      const std::vector<WeightMatrix>* weights,
                      const std::vector<QuantParams>* quant) {
  auto maps = map_network(net, cfg.array);
  auto blocks = enumerate_blocks(net, cfg.array);
  Allocation alloc = allocate(net, maps, blocks, cost,
                              cfg.chip.allocation_policy, cfg.array, cfg.chip);
  SimInputs in;
  in.net = &net;
  in.acfg = &cfg.array;
  in.chip = &cfg.chip;
  in.trace = &trace;
  in.allocation = &alloc;
  in.weights = weights;
  in.quant = quant;
  PointResult r{simulate(in), std::move(alloc)};
  return r;
}

Json quant_to_json(const std::vector<QuantParams>& quant) {
  Json j = Json::array();
  for (size_t i = 0; i < quant.size(); ++i)
    j.push_back(Json{{"layer", static_cast<int>(i)},
                     {"bias", quant[i].bias},
                     {"scale", quant[i].scale}});
  return j;
}

Json allocation_to_json(const Allocation& a) {
  Json j;
  j["policy"] = to_string(a.policy);
  j["arrays_used"] = a.arrays_used;
  j["arrays_budget"] = a.arrays_budget;
  int bu = a.bottleneck_unit();
  j["bottleneck"] = Json{
      {"unit", bu},
      {"layer", a.units[static_cast<size_t>(bu)].layer_index},
      {"block", a.units[static_cast<size_t>(bu)].block_id},
      {"load_per_duplicate", a.units[static_cast<size_t>(bu)].load /
                                 a.duplicates[static_cast<size_t>(bu)]}};
  j["units"] = Json::array();
  for (size_t i = 0; i < a.units.size(); ++i) {
    const AllocUnit& u = a.units[i];
    Json e;
    e["unit"] = u.id;
    e["layer"] = u.layer_index;
    if (u.block_id >= 0) e["block"] = u.block_id;
    e["cost"] = u.cost;
    e["load"] = u.load;
    e["duplicates"] = a.duplicates[i];
    j["units"].push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const std::string& preset, const std::string& network_path,
              const std::string& layers_json, const std::string& name,
              const std::string& densities_arg, int64_t images, uint64_t seed,
              const std::string& out_dir) {
  NetworkSpec net;
  if (!preset.empty()) {
    net = preset_network(preset);
  } else if (!network_path.empty()) {
    net = load_network(network_path);
  } else if (!layers_json.empty()) {
    Json layers = Json::parse(layers_json, nullptr, false);
    if (layers.is_discarded() || !layers.is_array())
      throw ParseError("--layers must be a JSON array of layer objects");
    Json j;
    j["name"] = name;
    j["layers"] = layers;
    net = network_from_json(j);
  } else {
    throw ValidationError("one of --preset, --network, --layers is required");
  }

  std::vector<double> densities;
  for (const auto& tok : split_list(densities_arg))
    densities.push_back(std::stod(tok));
  if (densities.size() == 1) densities.assign(net.layers.size(), densities[0]);
  if (densities.size() != net.layers.size())
    throw ValidationError("need 1 or layer-count densities, got " +
                          std::to_string(densities.size()));

  ActivationTrace trace = gen_synthetic_trace(net, densities, images, seed);

  save_json_atomic(out_dir + "/network.json", network_to_json(net));
  Json meta;
  meta["generator"] = "cimsim synth";
  meta["seed"] = seed;
  meta["densities"] = densities;
  if (!preset.empty()) meta["preset"] = preset;
  write_trace(trace, net, out_dir + "/trace.json", meta);
  std::cout << "wrote " << out_dir << "/network.json and " << out_dir
            << "/trace.json (" << net.layers.size() << " layers, " << images
            << " images)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// map

int cmd_map(const Inputs& in, const ConfigBundle& cfg,
            const std::string& out_path) {
  auto maps = map_network(in.net, cfg.array);
  auto blocks = enumerate_blocks(in.net, cfg.array);
  Json j;
  j["config"] = config_to_json(cfg);
  j["inputs"] = in.hashes();
  j["network"] = in.net.name;
  j["layers"] = Json::array();
  int64_t arrays = 0;
  for (const auto& m : maps) {
    Json e;
    e["layer"] = m.layer_index;
    e["matrix_rows"] = m.matrix_rows;
    e["matrix_cols"] = m.matrix_cols;
    e["grid_rows"] = m.grid_rows;
    e["grid_cols"] = m.grid_cols;
    e["patches_per_image"] = m.patches_per_image;
    e["arrays_total"] = m.arrays_total;
    j["layers"].push_back(std::move(e));
    arrays += m.arrays_total;
  }
  j["blocks"] = Json::array();
  for (const auto& b : blocks) {
    Json e;
    e["block"] = b.block_id;
    e["layer"] = b.layer_index;
    e["grid_row"] = b.grid_row;
    e["width_arrays"] = b.width_arrays;
    e["row_begin"] = b.row_begin;
    e["row_end"] = b.row_end;
    e["macs_per_patch"] = b.macs_per_patch;
    j["blocks"].push_back(std::move(e));
  }
  j["totals"] =
      Json{{"arrays", arrays}, {"blocks", static_cast<int64_t>(blocks.size())}};
  emit(out_path, j);
  return 0;
}

// ---------------------------------------------------------------------------
// profile

int cmd_profile(const Inputs& in, const ConfigBundle& cfg,
                const std::string& mode_arg, int64_t sample,
                const std::string& out_path) {
  if (mode_arg != "exact" && mode_arg != "analytic")
    throw ValidationError("profile mode must be exact or analytic");
  auto maps = map_network(in.net, cfg.array);
  auto blocks = enumerate_blocks(in.net, cfg.array);
  ProfileMode pmode =
      mode_arg == "analytic" ? ProfileMode::analytic : ProfileMode::exact;
  CostModel cm = profile_blocks(in.net, in.trace, cfg.array, maps, blocks,
                                pmode, cfg.chip.mode, sample);

  std::string csv = "block_id,layer,density,expected_cycles,mac_per_cycle\r\n";
  for (const auto& b : cm.blocks) {
    std::ostringstream row;
    row.precision(17);
    row << b.block_id << "," << b.layer_index << "," << b.density << ","
        << b.expected_cycles << "," << b.mac_per_cycle << "\r\n";
    csv += row.str();
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    save_text_atomic(out_path, csv);
    Json meta;
    meta["config"] = config_to_json(cfg);
    meta["inputs"] = in.hashes();
    meta["profile_mode"] = to_string(cm.mode);
    meta["scan_mode"] = to_string(cm.scan_mode);
    meta["sample_images"] = cm.sample_images;
    save_json_atomic(out_path + ".meta.json", meta);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// allocate

int cmd_allocate(const Inputs& in, const ConfigBundle& cfg, int64_t sample,
                 const std::string& out_path) {
  auto maps = map_network(in.net, cfg.array);
  auto blocks = enumerate_blocks(in.net, cfg.array);
  std::optional<CostModel> cm;
  if (cfg.chip.allocation_policy != AllocPolicy::weight)
    cm = profile_blocks(in.net, in.trace, cfg.array, maps, blocks,
                        ProfileMode::exact, cfg.chip.mode, sample);
  Allocation a = allocate(in.net, maps, blocks, cm ? &*cm : nullptr,
                          cfg.chip.allocation_policy, cfg.array, cfg.chip);
  Json j;
  j["config"] = config_to_json(cfg);
  j["inputs"] = in.hashes();
  j.update(allocation_to_json(a));
  emit(out_path, j);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Inputs& in, const ConfigBundle& cfg, int64_t sample,
                 const std::string& out_path) {
  auto maps = map_network(in.net, cfg.array);
  auto blocks = enumerate_blocks(in.net, cfg.array);
  std::optional<CostModel> cm;
  if (cfg.chip.allocation_policy != AllocPolicy::weight)
    cm = profile_blocks(in.net, in.trace, cfg.array, maps, blocks,
                        ProfileMode::exact, cfg.chip.mode, sample);
  std::vector<WeightMatrix> weights;
  std::vector<QuantParams> quant;
  const std::vector<WeightMatrix>* wp = nullptr;
  const std::vector<QuantParams>* qp = nullptr;
  if (cfg.chip.sim_mode == SimMode::functional) {
    weights = gen_weights(in.net, cfg.seed, cfg.array.weight_bits);
    quant = oracle::calibrate_quant(in.net, weights, in.trace);
    wp = &weights;
    qp = &quant;
  }
  PointResult r = run_point(in.net, in.trace, cfg, cm ? &*cm : nullptr, wp, qp);
  Json j;
  j["config"] = config_to_json(cfg);
  j["inputs"] = in.hashes();
  j["allocation"] = allocation_to_json(r.allocation);
  if (qp) j["quant"] = quant_to_json(quant);
  j["report"] = sim_report_to_json(r.report);
  emit(out_path, j);
  return 0;
}

// ---------------------------------------------------------------------------
// compare

BaselineSelector parse_baseline(const std::string& arg) {
  if (arg.find(':') != std::string::npos) {
    BaselineSelector b;
    std::stringstream ss(arg);
    std::getline(ss, b.policy, ':');
    std::getline(ss, b.dataflow, ':');
    std::getline(ss, b.mode, ':');
    return b;
  }
  if (arg == "baseline") return {"weight", "layerwise", "baseline"};
  if (arg == "weight") return {"weight", "layerwise", "zeroskip"};
  if (arg == "perf_layer") return {"perf_layer", "layerwise", "zeroskip"};
  if (arg == "block") return {"block", "blockwise", "zeroskip"};
  throw ValidationError("unknown baseline selector: " + arg);
}

int cmd_compare(const std::vector<std::string>& report_paths,
                const std::string& baseline_arg, const std::string& format,
                const std::string& out_path) {
  std::vector<SimReport> reports;
  std::string net_hash, trace_hash;
  for (const auto& path : report_paths) {
    Json j = load_json_file(path);
    if (!j.contains("report"))
      throw ValidationError(path + " is not a simulation report");
    if (j.contains("inputs")) {
      const Json& in = j["inputs"];
      if (in.contains("network")) {
        std::string h = in["network"]["fnv64"].get<std::string>();
        if (net_hash.empty())
          net_hash = h;
        else if (net_hash != h)
          throw ValidationError("reports were produced from different networks");
      }
      if (in.contains("trace")) {
        std::string h = in["trace"]["fnv64"].get<std::string>();
        if (trace_hash.empty())
          trace_hash = h;
        else if (trace_hash != h)
          throw ValidationError("reports were produced from different traces");
      }
    }
    reports.push_back(sim_report_from_json(j["report"]));
  }
  Comparison cmp = compare(reports, parse_baseline(baseline_arg));
  if (format == "csv") {
    if (out_path.empty())
      std::cout << comparison_to_csv(cmp);
    else
      save_text_atomic(out_path, comparison_to_csv(cmp));
  } else if (format == "json") {
    Json j = comparison_to_json(cmp);
    j["inputs"] = Json::array();
    for (const auto& path : report_paths)
      j["inputs"].push_back(
          Json{{"path", path}, {"fnv64", file_hash_hex(path)}});
    emit(out_path, j);
  } else {
    throw ValidationError("format must be csv or json");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// utilization

int cmd_utilization(const std::string& report_path,
                    const std::string& out_path) {
  Json j = load_json_file(report_path);
  if (!j.contains("report"))
    throw ValidationError(report_path + " is not a simulation report");
  SimReport rep = sim_report_from_json(j["report"]);
  std::string csv = utilization_table(rep);
  if (out_path.empty())
    std::cout << csv;
  else
    save_text_atomic(out_path, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelinePoint {
  std::string policy_name;  // weight | perf_layer | block | baseline
  int pes = 0;
};

ConfigBundle point_config(const ConfigBundle& base, const PipelinePoint& pt) {
  ConfigBundle cfg = base;
  cfg.chip.pe_count = pt.pes;
  if (pt.policy_name == "baseline") {
    cfg.chip.allocation_policy = AllocPolicy::weight;
    cfg.chip.dataflow = Dataflow::layerwise;
    cfg.chip.mode = ScanMode::baseline;
  } else {
    cfg.chip.allocation_policy = alloc_policy_from_string(pt.policy_name);
    cfg.chip.dataflow = cfg.chip.allocation_policy == AllocPolicy::block
                            ? Dataflow::blockwise
                            : Dataflow::layerwise;
  }
  return cfg;
}

int cmd_pipeline(const Inputs& in, ConfigBundle base, bool warmup_given,
                 const std::string& policies_arg, const std::string& pes_arg,
                 int64_t sample, const std::string& baseline_arg,
                 const std::string& out_dir) {
  // Comparison default: 8 measured images after 2 warm-up images.
  if (base.chip.pipeline_images == 0) base.chip.pipeline_images = 10;
  if (!warmup_given && base.chip.warmup_images == 0 &&
      base.chip.pipeline_images > 2)
    base.chip.warmup_images = 2;

  std::vector<PipelinePoint> points;
  for (const auto& pes_tok : split_list(pes_arg))
    for (const auto& pol : split_list(policies_arg))
      points.push_back({pol, std::stoi(pes_tok)});
  if (points.empty()) throw ValidationError("no (policy, pes) points");

  auto maps = map_network(in.net, base.array);
  auto blocks = enumerate_blocks(in.net, base.array);
  bool need_profile = false;
  bool need_functional = base.chip.sim_mode == SimMode::functional;
  for (const auto& pt : points)
    if (pt.policy_name == "perf_layer" || pt.policy_name == "block")
      need_profile = true;

  std::optional<CostModel> cm;
  if (need_profile)
    cm = profile_blocks(in.net, in.trace, base.array, maps, blocks,
                        ProfileMode::exact, ScanMode::zeroskip, sample);
  std::vector<WeightMatrix> weights;
  std::vector<QuantParams> quant;
  if (need_functional) {
    weights = gen_weights(in.net, base.seed, base.array.weight_bits);
    quant = oracle::calibrate_quant(in.net, weights, in.trace);
  }

  size_t threads = std::max<size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CIMSIM_THREADS"))
    threads = std::max<size_t>(1, static_cast<size_t>(std::atoll(env)));
  threads = std::min(threads, points.size());

  std::vector<std::optional<PointResult>> results(points.size());
  std::vector<std::string> errors(points.size());
  std::vector<int> error_codes(points.size(), 0);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        ConfigBundle cfg = point_config(base, points[i]);
        const CostModel* cost =
            cfg.chip.allocation_policy != AllocPolicy::weight && cm ? &*cm
                                                                    : nullptr;
        results[i] =
            run_point(in.net, in.trace, cfg, cost,
                      need_functional ? &weights : nullptr,
                      need_functional ? &quant : nullptr);
      } catch (const CapacityError& e) {
        errors[i] = e.what();
        error_codes[i] = 4;
      } catch (const std::exception& e) {
        errors[i] = e.what();
        error_codes[i] = 3;
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (size_t i = 0; i < points.size(); ++i) {
    if (error_codes[i] == 4) throw CapacityError(errors[i]);
    if (error_codes[i] != 0) throw ValidationError(errors[i]);
  }

  std::vector<SimReport> reports;
  for (size_t i = 0; i < points.size(); ++i) {
    const PipelinePoint& pt = points[i];
    ConfigBundle cfg = point_config(base, pt);
    Json j;
    j["config"] = config_to_json(cfg);
    j["inputs"] = in.hashes();
    j["allocation"] = allocation_to_json(results[i]->allocation);
    if (need_functional) j["quant"] = quant_to_json(quant);
    j["report"] = sim_report_to_json(results[i]->report);
    std::string name = out_dir + "/report_pe" + std::to_string(pt.pes) + "_" +
                       pt.policy_name + ".json";
    save_json_atomic(name, j);
    reports.push_back(results[i]->report);
  }

  Comparison cmp = compare(reports, parse_baseline(baseline_arg));
  Json cj = comparison_to_json(cmp);
  cj["inputs"] = in.hashes();
  cj["config"] = config_to_json(base);
  save_json_atomic(out_dir + "/comparison.json", cj);
  save_text_atomic(out_dir + "/comparison.csv", comparison_to_csv(cmp));
  std::cout << "wrote " << points.size() << " reports and comparison to "
            << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify (hidden): functional equivalence against the reference forward pass
// on seeded random networks.

int cmd_verify(uint64_t seed) {
  Prng rng = Prng::stream(seed, "verify");
  int failures = 0;
  for (int trial = 0; trial < 3; ++trial) {
    NetworkSpec net;
    net.name = "verify";
    int h = 5 + static_cast<int>(rng.next_below(3));
    LayerSpec l1;
    l1.kind = LayerKind::conv;
    l1.kh = l1.kw = 3;
    l1.cin = 3 + static_cast<int>(rng.next_below(5));
    l1.cout = 4 + static_cast<int>(rng.next_below(8));
    l1.stride = 1;
    l1.pad = 1;
    l1.in_h = l1.in_w = h;
    net.layers.push_back(l1);
    LayerSpec l2;
    l2.kind = LayerKind::fc;
    l2.in_features = l1.output_elems();
    l2.out_features = 8;
    net.layers.push_back(l2);

    std::vector<double> dens(net.layers.size(), 0.2 + 0.3 * rng.next_double());
    ActivationTrace trace = gen_synthetic_trace(net, dens, 2, seed + trial);
    auto weights = gen_weights(net, seed + trial);
    auto quant = oracle::calibrate_quant(net, weights, trace);

    ConfigBundle cfg;
    cfg.array.arrays_per_pe = 8;
    cfg.chip.pe_count = 16;
    cfg.chip.sim_mode = SimMode::functional;
    for (Dataflow df : {Dataflow::layerwise, Dataflow::blockwise}) {
      cfg.chip.dataflow = df;
      cfg.chip.allocation_policy = AllocPolicy::weight;
      PointResult r = run_point(net, trace, cfg, nullptr, &weights, &quant);
      for (int64_t m = 0; m < trace.images; ++m) {
        auto ref = oracle::forward(net, weights, trace.image_data(0, m), quant);
        if (r.report.final_activations[static_cast<size_t>(m)] !=
            ref.back().data) {
          std::cout << "mismatch: trial " << trial << " image " << m << " "
                    << to_string(df) << "\n";
          ++failures;
        }
      }
    }
  }
  std::cout << (failures == 0 ? "verify ok" : "verify FAILED") << "\n";
  return failures == 0 ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compute-in-memory crossbar simulator"};
  app.require_subcommand(1);

  // synth
  auto* synth =
      app.add_subcommand("synth", "generate a network + synthetic trace");
  std::string sy_preset, sy_network, sy_layers, sy_name = "custom";
  std::string sy_densities = "0.25", sy_out;
  int64_t sy_images = 4;
  uint64_t sy_seed = 1;
  synth->add_option("--preset", sy_preset,
                    "resnet18-shape|vgg11-shape|resnet18|vgg11");
  synth->add_option("--network", sy_network, "network JSON to reuse");
  synth->add_option("--layers", sy_layers, "inline JSON array of layers");
  synth->add_option("--name", sy_name, "network name for --layers");
  synth->add_option("--densities", sy_densities,
                    "per-layer bit densities (single value broadcasts)");
  synth->add_option("--images", sy_images, "images to generate");
  synth->add_option("--seed", sy_seed, "generator seed");
  synth->add_option("--out", sy_out, "output directory")->required();

  auto add_inputs = [](CLI::App* cmd, std::string& net_path,
                       std::string& trace_path, std::string& cfg_path,
                       bool trace_required) {
    cmd->add_option("--network", net_path, "network JSON")->required();
    auto* t = cmd->add_option("--trace", trace_path, "trace manifest JSON");
    if (trace_required) t->required();
    cmd->add_option("--config", cfg_path, "config JSON (flags override it)");
  };

  // map
  auto* mapc = app.add_subcommand("map", "emit the mapping report");
  std::string mp_net, mp_trace, mp_cfg, mp_out;
  Overrides mp_ov;
  add_inputs(mapc, mp_net, mp_trace, mp_cfg, false);
  mapc->add_option("--out", mp_out, "output file (stdout if omitted)");
  mp_ov.bind(mapc);

  // profile
  auto* prof =
      app.add_subcommand("profile", "profile densities and expected cycles");
  std::string pf_net, pf_trace, pf_cfg, pf_out, pf_mode = "exact";
  int64_t pf_sample = 4;
  Overrides pf_ov;
  add_inputs(prof, pf_net, pf_trace, pf_cfg, true);
  prof->add_option("--profile_mode", pf_mode, "exact|analytic");
  prof->add_option("--sample", pf_sample, "images to sample");
  prof->add_option("--out", pf_out, "CSV output (stdout if omitted)");
  pf_ov.bind(prof);

  // allocate
  auto* alc = app.add_subcommand("allocate", "run an allocation policy");
  std::string al_net, al_trace, al_cfg, al_out;
  int64_t al_sample = 4;
  Overrides al_ov;
  add_inputs(alc, al_net, al_trace, al_cfg, true);
  alc->add_option("--sample", al_sample, "profiling sample images");
  alc->add_option("--out", al_out, "output file (stdout if omitted)");
  al_ov.bind(alc);

  // simulate
  auto* simc = app.add_subcommand("simulate", "run one full simulation");
  std::string sm_net, sm_trace, sm_cfg, sm_out;
  int64_t sm_sample = 4;
  Overrides sm_ov;
  add_inputs(simc, sm_net, sm_trace, sm_cfg, true);
  simc->add_option("--sample", sm_sample, "profiling sample images");
  simc->add_option("--out", sm_out, "report file (stdout if omitted)");
  sm_ov.bind(simc);

  // compare
  auto* cmpc = app.add_subcommand("compare", "combine reports into a table");
  std::vector<std::string> cp_reports;
  std::string cp_baseline = "baseline", cp_format = "csv", cp_out;
  cmpc->add_option("--reports", cp_reports, "report JSON files")->required();
  cmpc->add_option("--baseline", cp_baseline,
                   "baseline row: name or policy:dataflow:mode");
  cmpc->add_option("--format", cp_format, "csv|json");
  cmpc->add_option("--out", cp_out, "output file (stdout if omitted)");

  // pipeline
  auto* pipe =
      app.add_subcommand("pipeline", "profile, allocate, simulate, compare");
  std::string pl_net, pl_trace, pl_cfg, pl_out;
  std::string pl_policies = "weight,perf_layer,block,baseline";
  std::string pl_pes, pl_baseline = "baseline";
  int64_t pl_sample = 4;
  Overrides pl_ov;
  add_inputs(pipe, pl_net, pl_trace, pl_cfg, true);
  pipe->add_option("--policies", pl_policies,
                   "comma list of weight|perf_layer|block|baseline");
  pipe->add_option("--pes", pl_pes, "comma list of design sizes")->required();
  pipe->add_option("--sample", pl_sample, "profiling sample images");
  pipe->add_option("--baseline", pl_baseline, "baseline selector");
  pipe->add_option("--out", pl_out, "output directory")->required();
  pl_ov.bind(pipe);

  // utilization
  auto* util = app.add_subcommand("utilization",
                                  "per-layer utilization table from a report");
  std::string ut_report, ut_out;
  util->add_option("--report", ut_report, "simulation report JSON")->required();
  util->add_option("--out", ut_out, "CSV output (stdout if omitted)");

  // verify (hidden)
  auto* ver = app.add_subcommand("verify", "internal self-checks");
  uint64_t ve_seed = 7;
  ver->add_option("--seed", ve_seed, "seed");
  ver->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth)
      return cmd_synth(sy_preset, sy_network, sy_layers, sy_name, sy_densities,
                       sy_images, sy_seed, sy_out);

    auto load_in = [](const std::string& net_path,
                      const std::string& trace_path,
                      const std::string& cfg_path) {
      Inputs in;
      in.network_path = net_path;
      in.trace_path = trace_path;
      in.config_path = cfg_path;
      in.net = load_network(net_path);
      if (!trace_path.empty()) {
        in.trace = load_trace(trace_path, in.net);
        in.has_trace = true;
      }
      return in;
    };

    if (*mapc) {
      Inputs in = load_in(mp_net, mp_trace, mp_cfg);
      ConfigBundle cfg = load_bundle(mp_cfg);
      mp_ov.apply(mapc, cfg);
      return cmd_map(in, cfg, mp_out);
    }
    if (*prof) {
      Inputs in = load_in(pf_net, pf_trace, pf_cfg);
      ConfigBundle cfg = load_bundle(pf_cfg);
      pf_ov.apply(prof, cfg);
      return cmd_profile(in, cfg, pf_mode, pf_sample, pf_out);
    }
    if (*alc) {
      Inputs in = load_in(al_net, al_trace, al_cfg);
      ConfigBundle cfg = load_bundle(al_cfg);
      al_ov.apply(alc, cfg);
      return cmd_allocate(in, cfg, al_sample, al_out);
    }
    if (*simc) {
      Inputs in = load_in(sm_net, sm_trace, sm_cfg);
      ConfigBundle cfg = load_bundle(sm_cfg);
      sm_ov.apply(simc, cfg);
      return cmd_simulate(in, cfg, sm_sample, sm_out);
    }
    if (*cmpc) return cmd_compare(cp_reports, cp_baseline, cp_format, cp_out);
    if (*util) return cmd_utilization(ut_report, ut_out);
    if (*pipe) {
      Inputs in = load_in(pl_net, pl_trace, pl_cfg);
      ConfigBundle cfg = load_bundle(pl_cfg);
      pl_ov.apply(pipe, cfg);
      return cmd_pipeline(in, cfg, pipe->count("--warmup") > 0, pl_policies,
                          pl_pes, pl_sample, pl_baseline, pl_out);
    }
    if (*ver) return cmd_verify(ve_seed);
  } catch (const CapacityError& e) {
    Json err{{"error", {{"type", "capacity"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 4;
  } catch (const ParseError& e) {
    Json err{{"error", {{"type", "parse"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    Json err{{"error", {{"type", "validation"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    Json err{{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 5;
  }
  return 0;
}
