#include "cimsim/stats.hpp"

#include <algorithm>
#include <cmath>

namespace cimsim {

const char* to_string(ProfileMode m) {
  return m == ProfileMode::exact ? "exact" : "analytic";
}

double bit_density(std::span<const uint8_t> values) {
  if (values.empty()) throw ValidationError("bit_density of empty tensor");
  int64_t ones = 0;
  for (uint8_t v : values) ones += std::popcount(static_cast<unsigned>(v));
  return static_cast<double>(ones) / (8.0 * static_cast<double>(values.size()));
}

double bit_density(const Tensor& t) {
  return bit_density(std::span<const uint8_t>(t.data.data(), t.data.size()));
}

namespace {

// E[max(min_read, ceil(X / rpr))] for X ~ Binomial(rows, p). Mirrored so the
// pmf recurrence starts from a representable base for any p.
double expected_batches(int rows, double p, int rpr, bool min_read) {
  if (p <= 0.0) return min_read ? 1.0 : 0.0;
  if (p >= 1.0)
    return std::ceil(static_cast<double>(rows) / rpr);
  bool mirrored = p > 0.5;
  double pm = mirrored ? 1.0 - p : p;
  double ratio = pm / (1.0 - pm);
  double pmf = std::pow(1.0 - pm, rows);
  double acc = 0.0;
  for (int k = 0; k <= rows; ++k) {
    int x = mirrored ? rows - k : k;
    double batches = x == 0 ? 0.0
                            : static_cast<double>((x + rpr - 1) / rpr);
    if (min_read) batches = std::max(1.0, batches);
    acc += pmf * batches;
    pmf *= ratio * static_cast<double>(rows - k) / (k + 1);
  }
  return acc;
}

}  // namespace

CostModel profile_blocks(const NetworkSpec& net, const ActivationTrace& trace,
                         const ArrayConfig& cfg,
                         const std::vector<LayerMapping>& maps,
                         const std::vector<Block>& blocks, ProfileMode mode,
                         ScanMode scan_mode, int64_t sample_images) {
  trace.validate(net);
  int64_t sample = std::min<int64_t>(sample_images, trace.images);
  if (sample < 1) throw ValidationError("profile sample is empty");

  CostModel cm;
  cm.mode = mode;
  cm.scan_mode = scan_mode;
  cm.sample_images = sample;
  cm.blocks.resize(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    cm.blocks[i].block_id = blocks[i].block_id;
    cm.blocks[i].layer_index = blocks[i].layer_index;
    cm.blocks[i].macs_per_patch = blocks[i].macs_per_patch;
  }

  uint64_t min_read = cfg.min_read_per_plane ? 1 : 0;
  double steps = static_cast<double>(cfg.column_steps());
  double rpr = static_cast<double>(cfg.rows_per_read());

  std::vector<uint8_t> patch_vec;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const LayerSpec& layer = net.layers[li];
    const LayerMapping& map = maps[li];
    patch_vec.assign(static_cast<size_t>(map.grid_rows) * cfg.array_rows, 0);

    // Block-id range of this layer; blocks are ordered by (layer, grid_row).
    size_t first = 0;
    while (first < blocks.size() &&
           blocks[first].layer_index != static_cast<int>(li))
      ++first;

    int64_t patches = map.patches_per_image;
    int64_t n_samples = sample * patches;
    for (int64_t m = 0; m < sample; ++m) {
      const uint8_t* image = trace.image_data(static_cast<int>(li), m);
      for (int64_t p = 0; p < patches; ++p) {
        fill_patch(layer, image, p, patch_vec.data());
        for (int g = 0; g < map.grid_rows; ++g) {
          BlockStats& bs = cm.blocks[first + static_cast<size_t>(g)];
          BitPlanes planes = build_bitplanes(
              patch_vec.data() + int64_t(g) * cfg.array_rows, cfg.array_rows,
              cfg.input_bits);
          for (int b = 0; b < cfg.input_bits; ++b)
            bs.plane_ones[static_cast<size_t>(b)] +=
                static_cast<double>(planes.ones(b));
          if (mode == ProfileMode::exact)
            bs.expected_cycles += static_cast<double>(
                cycles_from_planes(planes, scan_mode, cfg).cycles);
        }
      }
    }
    for (int g = 0; g < map.grid_rows; ++g) {
      BlockStats& bs = cm.blocks[first + static_cast<size_t>(g)];
      double total_ones = 0;
      for (int b = 0; b < cfg.input_bits; ++b) {
        bs.plane_ones[static_cast<size_t>(b)] /=
            static_cast<double>(n_samples);
        total_ones += bs.plane_ones[static_cast<size_t>(b)];
      }
      bs.density = total_ones /
                   (static_cast<double>(cfg.input_bits) * cfg.array_rows);
      if (mode == ProfileMode::exact) {
        bs.expected_cycles /= static_cast<double>(n_samples);
      } else {
        // Expected batch count per plane, treating enabled rows as i.i.d.
        // with the observed plane density (binomial expectation of
        // max(min_read, ceil(k / rows_per_read))).
        double cycles = 0;
        for (int b = 0; b < cfg.input_bits; ++b) {
          double p =
              bs.plane_ones[static_cast<size_t>(b)] / cfg.array_rows;
          double batches;
          if (scan_mode == ScanMode::baseline)
            batches = std::ceil(static_cast<double>(cfg.array_rows) / rpr);
          else
            batches = expected_batches(cfg.array_rows, p, cfg.rows_per_read(),
                                       min_read != 0);
          cycles += steps * std::max(static_cast<double>(min_read), batches);
        }
        bs.expected_cycles = cycles;
      }
      bs.mac_per_cycle = bs.expected_cycles > 0
                             ? static_cast<double>(bs.macs_per_patch) /
                                   bs.expected_cycles
                             : 0.0;
    }
  }

  cm.layers.resize(net.layers.size());
  for (size_t li = 0; li < net.layers.size(); ++li) {
    LayerStats& ls = cm.layers[li];
    ls.layer_index = static_cast<int>(li);
    ls.patches_per_image = maps[li].patches_per_image;
    ls.macs_per_image = net.layers[li].macs_per_image();
    double width_sum = 0, density_sum = 0, macpc_sum = 0;
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
      if (blocks[bi].layer_index != static_cast<int>(li)) continue;
      const BlockStats& bs = cm.blocks[bi];
      double w = static_cast<double>(blocks[bi].width_arrays);
      width_sum += w;
      density_sum += w * bs.density;
      ls.max_block_cycles = std::max(ls.max_block_cycles, bs.expected_cycles);
      // Sum of per-array MAC/cycle over the block's arrays.
      if (bs.expected_cycles > 0)
        macpc_sum +=
            static_cast<double>(bs.macs_per_patch) / bs.expected_cycles;
    }
    ls.density = width_sum > 0 ? density_sum / width_sum : 0.0;
    ls.barrier_cycles_per_image =
        static_cast<double>(ls.patches_per_image) * ls.max_block_cycles;
    ls.avg_array_mac_per_cycle = width_sum > 0 ? macpc_sum / width_sum : 0.0;
    ls.perf_load = ls.avg_array_mac_per_cycle > 0
                       ? static_cast<double>(ls.macs_per_image) /
                             ls.avg_array_mac_per_cycle
                       : 0.0;
  }
  return cm;
}

LineFit fit_density_line(std::span<const double> density,
                         std::span<const double> cycles) {
  if (density.size() != cycles.size() || density.size() < 2)
    throw ValidationError("fit needs >= 2 points");
  size_t n = density.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += density[i];
    my += cycles[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (density[i] - mx) * (density[i] - mx);
    sxy += (density[i] - mx) * (cycles[i] - my);
  }
  if (sxx == 0.0)
    throw ValidationError("degenerate fit: all densities equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < n; ++i) {
    double pred = fit.intercept + fit.slope * density[i];
    ss_res += (cycles[i] - pred) * (cycles[i] - pred);
    ss_tot += (cycles[i] - my) * (cycles[i] - my);
  }
  fit.r2 = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace cimsim
