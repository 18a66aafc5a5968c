#pragma once

#include <cstdint>
#include <vector>

#include "cimsim/mapping.hpp"
#include "cimsim/model.hpp"

namespace cimsim {

// Timing model of one array read pass. Inputs are shifted in one bit-plane at
// a time; per plane the enabled rows are digitized in batches of at most
// 2^adc_bits rows, and every batch costs cols_per_adc cycles while each ADC
// muxes across its column group (all ADCs of the array run in parallel).
// With min_read_per_plane, shifting a plane costs at least one batch even if
// no row is enabled, which pins the default array to the 64..1024 envelope.

// Bit-plane decomposition of one input slice (array_rows values).
struct BitPlanes {
  int rows = 0;
  int words = 0;       // 64-bit words per plane
  int plane_count = 0;
  std::vector<uint64_t> bits;  // plane-major

  const uint64_t* plane(int b) const { return bits.data() + b * words; }
  uint64_t* plane(int b) { return bits.data() + b * words; }
  int ones(int b) const;
};

BitPlanes build_bitplanes(const uint8_t* values, int rows, int input_bits);

// Explicit row batches per bit-plane. Zero-skip batches partition the enabled
// rows of a plane; baseline batches are consecutive windows covering all rows
// regardless of input bits.
struct ReadSchedule {
  ScanMode mode = ScanMode::zeroskip;
  std::vector<std::vector<std::vector<int>>> batches;  // [plane][batch] -> rows
  std::vector<int> batch_count;                        // per plane
};

ReadSchedule schedule_reads(const BitPlanes& planes, ScanMode mode,
                            const ArrayConfig& cfg);

uint64_t array_cycles(const ReadSchedule& sched, const ArrayConfig& cfg);

// Fast path used by the engine: identical cycle formula without
// materializing batches. Also reports ADC conversions (one per column per
// batch actually read).
struct CyclesReads {
  uint64_t cycles = 0;
  uint64_t reads = 0;
};
CyclesReads cycles_from_planes(const BitPlanes& planes, ScanMode mode,
                               const ArrayConfig& cfg);

// Column bit tiles of one layer's weight matrix, grouped per block so a
// block's 128-row window is word-aligned for popcount accumulation.
struct LayerWeightBits {
  int64_t cols = 0;     // out_channels
  int weight_bits = 0;
  int words = 0;        // words per (block, col, bit) mask == per-plane words
  int grid_rows = 0;
  // Layout: [grid_row][col][bit][word]
  std::vector<uint64_t> bits;

  const uint64_t* tile(int grid_row, int64_t col, int bit) const {
    return bits.data() +
           ((int64_t(grid_row) * cols + col) * weight_bits + bit) * words;
  }
};

LayerWeightBits build_weight_bits(const WeightMatrix& w,
                                  const LayerMapping& map,
                                  const ArrayConfig& cfg);

// One block of arrays executing its slice of a patch: every array of the
// block sees the same word lines, so the whole block shares one cycle count.
// psum[j] is exact (sum over planes of 2^b times the binary column sums).
struct BlockResult {
  uint64_t cycles = 0;
  uint64_t reads = 0;
  std::vector<int64_t> psum;  // one entry per output channel
};

BlockResult block_execute(const Block& block, const BitPlanes& slice,
                          const LayerWeightBits& weights, ScanMode mode,
                          const ArrayConfig& cfg);

// Cycles-only variant for timing-mode simulation.
CyclesReads block_cycles(const BitPlanes& slice, ScanMode mode,
                         const ArrayConfig& cfg);

}  // namespace cimsim
