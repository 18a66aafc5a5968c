#pragma once

#include <cstdint>
#include <vector>

#include "cimsim/model.hpp"

namespace cimsim {

// A layer's filter matrix tiled onto the array grid. Tail tiles are
// zero-padded; every grid row is one block.
struct LayerMapping {
  int layer_index = 0;
  int64_t matrix_rows = 0;
  int64_t matrix_cols = 0;  // out_channels * weight_bits
  int grid_rows = 0;
  int grid_cols = 0;
  int64_t patches_per_image = 0;
  int64_t arrays_total = 0;
};

// One grid row of arrays. All arrays of a block share word lines, consume the
// same 1xarray_rows input slice, and therefore run in lockstep.
struct Block {
  int block_id = 0;
  int layer_index = 0;
  int grid_row = 0;
  int width_arrays = 0;
  int64_t row_begin = 0;  // active rows of the vectorized patch
  int64_t row_end = 0;
  int64_t macs_per_patch = 0;  // active_rows * out_channels
};

LayerMapping map_layer(const LayerSpec& layer, int layer_index,
                       const ArrayConfig& cfg);
std::vector<LayerMapping> map_network(const NetworkSpec& net,
                                      const ArrayConfig& cfg);

// Blocks ordered by (layer, grid_row), ids dense from 0.
std::vector<Block> enumerate_blocks(const NetworkSpec& net,
                                    const ArrayConfig& cfg);

// Vectorizes one im2col patch: row order is (ky, kx, channel), patches in
// raster order. `out` must hold matrix_rows bytes. `image` points at one
// image's input ([h][w][c] for conv, flat for fc).
void fill_patch(const LayerSpec& layer, const uint8_t* image, int64_t patch,
                uint8_t* out);

// Convenience for tests: all patches of one image, materialized.
std::vector<std::vector<uint8_t>> im2col_patches(const LayerSpec& layer,
                                                 const uint8_t* image);

// First-fit-decreasing placement of block instances into PEs. Returns one PE
// id per instance (input order). A block instance never straddles PEs.
std::vector<int> place_on_pes(const std::vector<int>& instance_widths,
                              const ArrayConfig& cfg, const ChipConfig& chip);

}  // namespace cimsim
