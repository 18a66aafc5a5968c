#include "cimsim/mapping.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

namespace cimsim {

LayerMapping map_layer(const LayerSpec& layer, int layer_index,
                       const ArrayConfig& cfg) {
  LayerMapping m;
  m.layer_index = layer_index;
  m.matrix_rows = layer.matrix_rows();
  m.matrix_cols = layer.out_channels() * cfg.weight_bits;
  m.grid_rows = static_cast<int>(ceil_div(m.matrix_rows, cfg.array_rows));
  m.grid_cols = static_cast<int>(ceil_div(m.matrix_cols, cfg.array_cols));
  m.patches_per_image = layer.patches_per_image();
  m.arrays_total = int64_t(m.grid_rows) * m.grid_cols;
  return m;
}

std::vector<LayerMapping> map_network(const NetworkSpec& net,
                                      const ArrayConfig& cfg) {
  std::vector<LayerMapping> maps;
  maps.reserve(net.layers.size());
  for (size_t i = 0; i < net.layers.size(); ++i)
    maps.push_back(map_layer(net.layers[i], static_cast<int>(i), cfg));
  return maps;
}

std::vector<Block> enumerate_blocks(const NetworkSpec& net,
                                    const ArrayConfig& cfg) {
  std::vector<Block> blocks;
  int id = 0;
  for (size_t i = 0; i < net.layers.size(); ++i) {
    LayerMapping m = map_layer(net.layers[i], static_cast<int>(i), cfg);
    int64_t out_ch = net.layers[i].out_channels();
    for (int g = 0; g < m.grid_rows; ++g) {
      Block b;
      b.block_id = id++;
      b.layer_index = static_cast<int>(i);
      b.grid_row = g;
      b.width_arrays = m.grid_cols;
      b.row_begin = int64_t(g) * cfg.array_rows;
      b.row_end = std::min<int64_t>(b.row_begin + cfg.array_rows,
                                    m.matrix_rows);
      b.macs_per_patch = (b.row_end - b.row_begin) * out_ch;
      blocks.push_back(b);
    }
  }
  return blocks;
}

void fill_patch(const LayerSpec& layer, const uint8_t* image, int64_t patch,
                uint8_t* out) {
  if (layer.kind == LayerKind::fc) {
    std::memcpy(out, image, static_cast<size_t>(layer.in_features));
    return;
  }
  int out_w = layer.out_w();
  int oy = static_cast<int>(patch / out_w);
  int ox = static_cast<int>(patch % out_w);
  int base_y = oy * layer.stride - layer.pad;
  int base_x = ox * layer.stride - layer.pad;
  int64_t r = 0;
  for (int ky = 0; ky < layer.kh; ++ky) {
    int iy = base_y + ky;
    bool row_in = iy >= 0 && iy < layer.in_h;
    for (int kx = 0; kx < layer.kw; ++kx) {
      int ix = base_x + kx;
      if (row_in && ix >= 0 && ix < layer.in_w) {
        const uint8_t* src =
            image + (int64_t(iy) * layer.in_w + ix) * layer.cin;
        std::memcpy(out + r, src, static_cast<size_t>(layer.cin));
      } else {
        std::memset(out + r, 0, static_cast<size_t>(layer.cin));
      }
      r += layer.cin;
    }
  }
}

std::vector<std::vector<uint8_t>> im2col_patches(const LayerSpec& layer,
                                                 const uint8_t* image) {
  int64_t n = layer.patches_per_image();
  int64_t rows = layer.matrix_rows();
  std::vector<std::vector<uint8_t>> patches(
      static_cast<size_t>(n), std::vector<uint8_t>(static_cast<size_t>(rows)));
  for (int64_t p = 0; p < n; ++p)
    fill_patch(layer, image, p, patches[static_cast<size_t>(p)].data());
  return patches;
}

std::vector<int> place_on_pes(const std::vector<int>& instance_widths,
                              const ArrayConfig& cfg, const ChipConfig& chip) {
  int64_t demand = std::accumulate(instance_widths.begin(),
                                   instance_widths.end(), int64_t(0));
  int64_t budget = int64_t(chip.pe_count) * cfg.arrays_per_pe;
  if (demand > budget)
    throw CapacityError("placement needs " + std::to_string(demand) +
                        " arrays, chip has " + std::to_string(budget));

  std::vector<size_t> order(instance_widths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return instance_widths[a] > instance_widths[b];
  });

  std::vector<int> free_arrays(static_cast<size_t>(chip.pe_count),
                               cfg.arrays_per_pe);
  std::vector<int> pe_of(instance_widths.size(), -1);
  for (size_t idx : order) {
    int w = instance_widths[idx];
    if (w > cfg.arrays_per_pe)
      throw CapacityError("block width " + std::to_string(w) +
                          " exceeds arrays_per_pe");
    bool placed = false;
    for (int pe = 0; pe < chip.pe_count; ++pe) {
      if (free_arrays[static_cast<size_t>(pe)] >= w) {
        free_arrays[static_cast<size_t>(pe)] -= w;
        pe_of[idx] = pe;
        placed = true;
        break;
      }
    }
    if (!placed)
      throw CapacityError("placement failed: no PE has " + std::to_string(w) +
                          " free arrays");
  }
  return pe_of;
}

}  // namespace cimsim
