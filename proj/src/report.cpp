#include "cimsim/report.hpp"

#include <algorithm>
#include <sstream>

namespace cimsim {

Json sim_report_to_json(const SimReport& rep) {
  Json j;
  j["network"] = rep.network_name;
  j["policy"] = to_string(rep.policy);
  j["dataflow"] = to_string(rep.dataflow);
  j["mode"] = to_string(rep.mode);
  j["sim_mode"] = to_string(rep.sim_mode);
  j["pe_count"] = rep.pe_count;
  j["images"] = rep.images;
  j["warmup_images"] = rep.warmup_images;
  j["makespan_cycles"] = rep.makespan_cycles;
  j["warm_end_cycles"] = rep.warm_end_cycles;
  j["window_cycles"] = rep.window_cycles;
  j["throughput_images_per_s"] = rep.throughput_images_per_s;
  j["counters"] = Json{{"psum_packets", rep.psum_packets},
                       {"input_packets", rep.input_packets},
                       {"total_hops", rep.total_hops}};
  j["layers"] = Json::array();
  for (const auto& l : rep.layers) {
    Json e;
    e["layer"] = l.layer;
    e["instances"] = l.instances;
    e["arrays"] = l.arrays;
    e["busy_cycles"] = l.busy_cycles;
    e["utilization"] = l.utilization;
    j["layers"].push_back(std::move(e));
  }
  j["instances"] = Json::array();
  for (const auto& i : rep.instances) {
    Json e;
    e["id"] = i.id;
    e["layer"] = i.layer;
    e["block"] = i.block_id;
    e["duplicate"] = i.duplicate;
    e["pe"] = i.pe;
    e["width"] = i.width;
    e["busy_cycles"] = i.busy_cycles;
    e["stall_cycles"] = i.stall_cycles;
    j["instances"].push_back(std::move(e));
  }
  j["duplicates_per_block"] = rep.duplicates_per_block;
  j["activations_checksum"] = rep.activations_checksum;
  return j;
}

SimReport sim_report_from_json(const Json& j) {
  SimReport rep;
  rep.network_name = j.at("network").get<std::string>();
  rep.policy = alloc_policy_from_string(j.at("policy").get<std::string>());
  rep.dataflow = dataflow_from_string(j.at("dataflow").get<std::string>());
  rep.mode = scan_mode_from_string(j.at("mode").get<std::string>());
  rep.sim_mode = sim_mode_from_string(j.at("sim_mode").get<std::string>());
  rep.pe_count = j.at("pe_count").get<int>();
  rep.images = j.at("images").get<int64_t>();
  rep.warmup_images = j.at("warmup_images").get<int64_t>();
  rep.makespan_cycles = j.at("makespan_cycles").get<uint64_t>();
  rep.warm_end_cycles = j.at("warm_end_cycles").get<uint64_t>();
  rep.window_cycles = j.at("window_cycles").get<uint64_t>();
  rep.throughput_images_per_s = j.at("throughput_images_per_s").get<double>();
  if (j.contains("layers")) {
    for (const auto& e : j["layers"]) {
      LayerReport l;
      l.layer = e.at("layer").get<int>();
      l.instances = e.at("instances").get<int>();
      l.arrays = e.at("arrays").get<int64_t>();
      l.busy_cycles = e.at("busy_cycles").get<uint64_t>();
      l.utilization = e.at("utilization").get<double>();
      rep.layers.push_back(l);
    }
  }
  return rep;
}

Comparison compare(const std::vector<SimReport>& reports,
                   const BaselineSelector& baseline) {
  if (reports.empty()) throw ValidationError("no reports to compare");
  for (const auto& r : reports) {
    if (r.network_name != reports[0].network_name)
      throw ValidationError("reports describe different networks");
    if (r.images != reports[0].images ||
        r.warmup_images != reports[0].warmup_images)
      throw ValidationError("reports describe different image workloads");
  }

  Comparison cmp;
  cmp.baseline = baseline;
  for (const auto& r : reports) {
    ComparisonRow row;
    row.pe_count = r.pe_count;
    row.policy = to_string(r.policy);
    row.dataflow = to_string(r.dataflow);
    row.mode = to_string(r.mode);
    row.makespan = r.window_cycles;
    row.throughput = r.throughput_images_per_s;
    cmp.rows.push_back(row);
  }
  std::stable_sort(cmp.rows.begin(), cmp.rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) {
                     if (a.pe_count != b.pe_count) return a.pe_count < b.pe_count;
                     return a.policy < b.policy;
                   });
  for (auto& row : cmp.rows) {
    const ComparisonRow* base = nullptr;
    for (const auto& cand : cmp.rows) {
      if (cand.pe_count == row.pe_count && cand.policy == baseline.policy &&
          cand.dataflow == baseline.dataflow && cand.mode == baseline.mode) {
        base = &cand;
        break;
      }
    }
    row.speedup = base && row.makespan > 0
                      ? static_cast<double>(base->makespan) /
                            static_cast<double>(row.makespan)
                      : 1.0;
  }
  return cmp;
}

Json comparison_to_json(const Comparison& c) {
  Json j;
  j["baseline"] = Json{{"policy", c.baseline.policy},
                       {"dataflow", c.baseline.dataflow},
                       {"mode", c.baseline.mode}};
  j["rows"] = Json::array();
  for (const auto& r : c.rows) {
    Json e;
    e["pe_count"] = r.pe_count;
    e["policy"] = r.policy;
    e["dataflow"] = r.dataflow;
    e["mode"] = r.mode;
    e["makespan"] = r.makespan;
    e["throughput_images_per_s"] = r.throughput;
    e["speedup"] = r.speedup;
    j["rows"].push_back(std::move(e));
  }
  return j;
}

std::string csv_escape(const std::string& field) {
  bool needs_quote = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quote) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string comparison_to_csv(const Comparison& c) {
  std::string out = "pe_count,policy,dataflow,mode,makespan,"
                    "throughput_images_per_s,speedup\r\n";
  for (const auto& r : c.rows) {
    out += std::to_string(r.pe_count) + "," + csv_escape(r.policy) + "," +
           csv_escape(r.dataflow) + "," + csv_escape(r.mode) + "," +
           std::to_string(r.makespan) + "," + fmt_double(r.throughput) + "," +
           fmt_double(r.speedup) + "\r\n";
  }
  return out;
}

std::string utilization_table(const SimReport& rep) {
  if (rep.layers.empty()) throw ValidationError("report has no layers");
  std::string out = "layer,instances,arrays,busy_cycles,utilization\r\n";
  for (const auto& l : rep.layers) {
    out += std::to_string(l.layer) + "," + std::to_string(l.instances) + "," +
           std::to_string(l.arrays) + "," + std::to_string(l.busy_cycles) +
           "," + fmt_double(l.utilization) + "\r\n";
  }
  return out;
}

}  // namespace cimsim
