#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cimsim/arraysim.hpp"
#include "cimsim/mapping.hpp"
#include "cimsim/model.hpp"

namespace cimsim {

enum class ProfileMode { exact, analytic };
const char* to_string(ProfileMode m);

// Fraction of 1 bits over all 8 bits of every element.
double bit_density(std::span<const uint8_t> values);
double bit_density(const Tensor& t);

struct BlockStats {
  int block_id = 0;
  int layer_index = 0;
  double density = 0.0;                    // mean over planes and patches
  std::array<double, 8> plane_ones{};      // mean enabled rows per plane
  double expected_cycles = 0.0;            // E_g per patch
  int64_t macs_per_patch = 0;
  double mac_per_cycle = 0.0;
};

struct LayerStats {
  int layer_index = 0;
  double density = 0.0;  // width-weighted mean of its blocks
  int64_t patches_per_image = 0;
  double max_block_cycles = 0.0;
  // patches * max_block_cycles: per-image latency of one un-duplicated copy
  // under the per-patch barrier.
  double barrier_cycles_per_image = 0.0;
  int64_t macs_per_image = 0;
  double avg_array_mac_per_cycle = 0.0;
  // macs_per_image / avg_array_mac_per_cycle: the cycles an average array
  // would need for the whole layer; drives performance-based allocation.
  double perf_load = 0.0;
};

struct CostModel {
  ProfileMode mode = ProfileMode::exact;
  ScanMode scan_mode = ScanMode::zeroskip;
  int64_t sample_images = 0;
  std::vector<BlockStats> blocks;
  std::vector<LayerStats> layers;
};

// Profiles block densities over min(sample_images, trace.images) images and
// derives expected cycles either by simulating every sampled patch (exact)
// or from per-plane densities (analytic). Uses the trace tensor of each
// layer directly.
CostModel profile_blocks(const NetworkSpec& net, const ActivationTrace& trace,
                         const ArrayConfig& cfg,
                         const std::vector<LayerMapping>& maps,
                         const std::vector<Block>& blocks,
                         ProfileMode mode = ProfileMode::exact,
                         ScanMode scan_mode = ScanMode::zeroskip,
                         int64_t sample_images = 4);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least-squares fit of expected cycles on density. Degenerate (all x equal)
// throws.
LineFit fit_density_line(std::span<const double> density,
                         std::span<const double> cycles);

}  // namespace cimsim
