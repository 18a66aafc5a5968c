#pragma once

#include <cstdint>
#include <vector>

#include "cimsim/mapping.hpp"
#include "cimsim/model.hpp"
#include "cimsim/stats.hpp"

namespace cimsim {

// An allocatable unit: a whole layer (layer policies, cost = the layer's
// arrays) or a block identity (block policy, cost = block width).
struct AllocUnit {
  int id = 0;
  int layer_index = -1;
  int block_id = -1;  // -1 for layer units
  int64_t cost = 0;   // arrays per duplicate
  double load = 0.0;  // expected cycles (perf/block) or total MACs (weight)
};

struct Allocation {
  AllocPolicy policy = AllocPolicy::weight;
  std::vector<AllocUnit> units;
  std::vector<int> duplicates;  // d_u >= 1, parallel to units
  int64_t arrays_used = 0;
  int64_t arrays_budget = 0;

  // max_u load_u / d_u, the predicted bottleneck.
  double max_load_per_dup() const;
  int bottleneck_unit() const;
  // Per-block duplicate counts (layer units fan out to their blocks).
  std::vector<int> per_block_duplicates(const std::vector<Block>& blocks) const;
};

// Greedy array allocation: start from one copy of everything, repeatedly
// give one more duplicate to the unit with the highest load per duplicate
// (ties to the lowest unit id), and stop when the current slowest unit does
// not fit. With fill_remainder, unaffordable units are skipped and the
// remaining budget goes to the next-loaded unit that still fits.
Allocation allocate_greedy(const std::vector<AllocUnit>& units, int64_t budget,
                           bool fill_remainder = false);

// Builds the policy's unit set from the cost model and dispatches to the
// greedy over the chip's array budget. The cost model may be null for the
// weight policy (its loads are MAC counts only).
Allocation allocate(const NetworkSpec& net,
                    const std::vector<LayerMapping>& maps,
                    const std::vector<Block>& blocks, const CostModel* cost,
                    AllocPolicy policy, const ArrayConfig& cfg,
                    const ChipConfig& chip);

// Exhaustive minimizer of max_u load_u/d_u for small instances; the test
// oracle for the greedy. Guarded to <= 6 units and budget <= 32.
Allocation brute_force_allocate(const std::vector<AllocUnit>& units,
                                int64_t budget);

}  // namespace cimsim
