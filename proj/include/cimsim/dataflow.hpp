#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cimsim/alloc.hpp"
#include "cimsim/arraysim.hpp"
#include "cimsim/mapping.hpp"
#include "cimsim/model.hpp"
#include "cimsim/oracle.hpp"

namespace cimsim {

struct InstanceReport {
  int id = 0;
  int layer = 0;
  int block_id = 0;
  int duplicate = 0;
  int pe = 0;
  int width = 0;
  uint64_t busy_cycles = 0;
  uint64_t stall_cycles = 0;
};

struct LayerReport {
  int layer = 0;
  int instances = 0;
  int64_t arrays = 0;
  uint64_t busy_cycles = 0;
  double utilization = 0.0;  // array-weighted busy / (arrays * makespan)
};

struct SimReport {
  std::string network_name;
  AllocPolicy policy = AllocPolicy::weight;
  Dataflow dataflow = Dataflow::layerwise;
  ScanMode mode = ScanMode::zeroskip;
  SimMode sim_mode = SimMode::functional;
  int pe_count = 0;
  int64_t images = 0;
  int64_t warmup_images = 0;

  uint64_t makespan_cycles = 0;
  uint64_t warm_end_cycles = 0;
  uint64_t window_cycles = 0;  // makespan minus the warm-up prefix
  double throughput_images_per_s = 0.0;

  uint64_t psum_packets = 0;
  uint64_t input_packets = 0;
  uint64_t total_hops = 0;

  std::vector<LayerReport> layers;
  std::vector<InstanceReport> instances;
  std::vector<int> duplicates_per_block;
  // FNV-1a of the final layer's activations across images; empty in timing
  // mode.
  std::string activations_checksum;
  // Final-layer outputs per image (functional mode), for oracle comparison.
  std::vector<std::vector<uint8_t>> final_activations;
};

// Full simulation inputs. `weights` and `quant` may be null in timing mode.
struct SimInputs {
  const NetworkSpec* net = nullptr;
  const ArrayConfig* acfg = nullptr;
  const ChipConfig* chip = nullptr;
  const ActivationTrace* trace = nullptr;
  const Allocation* allocation = nullptr;  // null: one copy of everything
  const std::vector<WeightMatrix>* weights = nullptr;
  const std::vector<QuantParams>* quant = nullptr;
};

// Event-driven execution with the per-patch barrier: each duplicate of a
// layer owns a contiguous chunk of the image's patches and its blocks start
// every patch together. Requires a layer-based allocation.
SimReport run_layerwise(const SimInputs& in);

// Work-queue execution: per block identity, pending (image, patch) items
// dispatch FIFO to the earliest-free duplicate instance; partial sums meet at
// destination accumulators, with no intra-layer barrier.
SimReport run_blockwise(const SimInputs& in);

// Dispatches on chip->dataflow.
SimReport simulate(const SimInputs& in);

}  // namespace cimsim
