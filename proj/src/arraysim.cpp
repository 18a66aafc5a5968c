#include "cimsim/arraysim.hpp"

#include <algorithm>

namespace cimsim {

int BitPlanes::ones(int b) const {
  const uint64_t* p = plane(b);
  int n = 0;
  for (int w = 0; w < words; ++w) n += popcount64(p[w]);
  return n;
}

BitPlanes build_bitplanes(const uint8_t* values, int rows, int input_bits) {
  BitPlanes bp;
  bp.rows = rows;
  bp.words = static_cast<int>(ceil_div(rows, 64));
  bp.plane_count = input_bits;
  bp.bits.assign(static_cast<size_t>(bp.words) * input_bits, 0);
  for (int r = 0; r < rows; ++r) {
    uint8_t v = values[r];
    if (!v) continue;
    uint64_t bit = 1ull << (r & 63);
    int word = r >> 6;
    for (int b = 0; b < input_bits; ++b)
      if (v & (1u << b)) bp.plane(b)[word] |= bit;
  }
  return bp;
}

ReadSchedule schedule_reads(const BitPlanes& planes, ScanMode mode,
                            const ArrayConfig& cfg) {
  ReadSchedule sched;
  sched.mode = mode;
  int rpr = cfg.rows_per_read();
  sched.batches.resize(static_cast<size_t>(planes.plane_count));
  sched.batch_count.resize(static_cast<size_t>(planes.plane_count), 0);
  for (int b = 0; b < planes.plane_count; ++b) {
    auto& plane_batches = sched.batches[static_cast<size_t>(b)];
    if (mode == ScanMode::baseline) {
      // Consecutive fixed-size windows over all rows, input-independent.
      for (int start = 0; start < planes.rows; start += rpr) {
        std::vector<int> batch;
        for (int r = start; r < std::min(start + rpr, planes.rows); ++r)
          batch.push_back(r);
        plane_batches.push_back(std::move(batch));
      }
    } else {
      const uint64_t* p = planes.plane(b);
      std::vector<int> batch;
      for (int w = 0; w < planes.words; ++w) {
        uint64_t word = p[w];
        while (word) {
          int r = (w << 6) + std::countr_zero(word);
          word &= word - 1;
          batch.push_back(r);
          if (static_cast<int>(batch.size()) == rpr) {
            plane_batches.push_back(std::move(batch));
            batch.clear();
          }
        }
      }
      if (!batch.empty()) plane_batches.push_back(std::move(batch));
    }
    sched.batch_count[static_cast<size_t>(b)] =
        static_cast<int>(plane_batches.size());
  }
  return sched;
}

uint64_t array_cycles(const ReadSchedule& sched, const ArrayConfig& cfg) {
  uint64_t steps = static_cast<uint64_t>(cfg.column_steps());
  uint64_t min_read = cfg.min_read_per_plane ? 1 : 0;
  uint64_t cycles = 0;
  for (int count : sched.batch_count)
    cycles += steps * std::max<uint64_t>(min_read, static_cast<uint64_t>(count));
  return cycles;
}

CyclesReads cycles_from_planes(const BitPlanes& planes, ScanMode mode,
                               const ArrayConfig& cfg) {
  uint64_t steps = static_cast<uint64_t>(cfg.column_steps());
  uint64_t min_read = cfg.min_read_per_plane ? 1 : 0;
  uint64_t baseline_batches =
      static_cast<uint64_t>(ceil_div(planes.rows, cfg.rows_per_read()));
  CyclesReads out;
  for (int b = 0; b < planes.plane_count; ++b) {
    uint64_t batches =
        mode == ScanMode::baseline
            ? baseline_batches
            : static_cast<uint64_t>(
                  ceil_div(planes.ones(b), cfg.rows_per_read()));
    out.cycles += steps * std::max(min_read, batches);
    out.reads += batches * static_cast<uint64_t>(cfg.array_cols);
  }
  return out;
}

LayerWeightBits build_weight_bits(const WeightMatrix& w,
                                  const LayerMapping& map,
                                  const ArrayConfig& cfg) {
  LayerWeightBits wb;
  wb.cols = w.cols;
  wb.weight_bits = cfg.weight_bits;
  wb.words = static_cast<int>(ceil_div(cfg.array_rows, 64));
  wb.grid_rows = map.grid_rows;
  wb.bits.assign(static_cast<size_t>(wb.grid_rows) * wb.cols * wb.weight_bits *
                     wb.words,
                 0);
  for (int g = 0; g < wb.grid_rows; ++g) {
    int64_t row_begin = int64_t(g) * cfg.array_rows;
    int64_t row_end = std::min<int64_t>(row_begin + cfg.array_rows, w.rows);
    for (int64_t r = row_begin; r < row_end; ++r) {
      int local = static_cast<int>(r - row_begin);
      int word = local >> 6;
      uint64_t bit = 1ull << (local & 63);
      const uint8_t* row = w.values.data() + r * w.cols;
      for (int64_t c = 0; c < w.cols; ++c) {
        uint8_t v = row[c];
        if (!v) continue;
        uint64_t* base =
            wb.bits.data() +
            ((int64_t(g) * wb.cols + c) * wb.weight_bits + 0) * wb.words;
        for (int k = 0; k < wb.weight_bits; ++k)
          if (v & (1u << k)) base[int64_t(k) * wb.words + word] |= bit;
      }
    }
  }
  return wb;
}

BlockResult block_execute(const Block& block, const BitPlanes& slice,
                          const LayerWeightBits& weights, ScanMode mode,
                          const ArrayConfig& cfg) {
  BlockResult out;
  CyclesReads cr = cycles_from_planes(slice, mode, cfg);
  out.cycles = cr.cycles;
  out.reads = cr.reads;
  out.psum.assign(static_cast<size_t>(weights.cols), 0);
  int words = std::min(slice.words, weights.words);
  for (int64_t c = 0; c < weights.cols; ++c) {
    int64_t acc = 0;
    for (int b = 0; b < slice.plane_count; ++b) {
      const uint64_t* plane = slice.plane(b);
      int64_t plane_sum = 0;
      for (int k = 0; k < weights.weight_bits; ++k) {
        const uint64_t* tile = weights.tile(block.grid_row, c, k);
        int ones = 0;
        for (int w = 0; w < words; ++w) ones += popcount64(plane[w] & tile[w]);
        plane_sum += int64_t(ones) << k;
      }
      acc += plane_sum << b;
    }
    out.psum[static_cast<size_t>(c)] = acc;
  }
  return out;
}

CyclesReads block_cycles(const BitPlanes& slice, ScanMode mode,
                         const ArrayConfig& cfg) {
  return cycles_from_planes(slice, mode, cfg);
}

}  // namespace cimsim
