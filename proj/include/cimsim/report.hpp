#pragma once

#include <string>
#include <vector>

#include "cimsim/dataflow.hpp"
#include "cimsim/io.hpp"

namespace cimsim {

Json sim_report_to_json(const SimReport& rep);

// Reads back the fields comparisons need (identity, window, throughput).
SimReport sim_report_from_json(const Json& j);

struct ComparisonRow {
  int pe_count = 0;
  std::string policy;
  std::string dataflow;
  std::string mode;
  uint64_t makespan = 0;  // measured window cycles
  double throughput = 0.0;
  double speedup = 1.0;
};

struct BaselineSelector {
  std::string policy = "weight";
  std::string dataflow = "layerwise";
  std::string mode = "baseline";
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // sorted by (pe_count, policy)
  BaselineSelector baseline;
};

// Builds the comparison table. Speedup of a row is the makespan of the
// baseline-selected row at the same pe_count divided by this row's makespan.
// All reports must describe the same network and image workload.
Comparison compare(const std::vector<SimReport>& reports,
                   const BaselineSelector& baseline);

Json comparison_to_json(const Comparison& c);
std::string comparison_to_csv(const Comparison& c);

// One row per layer: utilization and instance count.
std::string utilization_table(const SimReport& rep);

// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

}  // namespace cimsim
