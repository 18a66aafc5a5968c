#include "cimsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cimsim {

uint8_t vector_unit_finalize(int64_t psum, const QuantParams& q) {
  double v = static_cast<double>(psum + q.bias) * q.scale;
  int64_t r = std::llround(v);
  if (r < 0) r = 0;        // clamp low doubles as ReLU on signed biases
  if (r > 255) r = 255;
  return static_cast<uint8_t>(r);
}

namespace oracle {

namespace {

// Raw integer outputs of one layer (pre-quantization).
std::vector<int64_t> layer_psums(const LayerSpec& l, const WeightMatrix& w,
                                 const uint8_t* in) {
  std::vector<int64_t> out(static_cast<size_t>(l.output_elems()), 0);
  if (l.kind == LayerKind::fc) {
    for (int64_t o = 0; o < l.out_features; ++o) {
      int64_t acc = 0;
      for (int64_t i = 0; i < l.in_features; ++i)
        acc += int64_t(in[i]) * w.at(i, o);
      out[static_cast<size_t>(o)] = acc;
    }
    return out;
  }
  int oh = l.out_h(), ow = l.out_w();
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      int64_t* dst = out.data() + (int64_t(oy) * ow + ox) * l.cout;
      for (int ky = 0; ky < l.kh; ++ky) {
        int iy = oy * l.stride - l.pad + ky;
        if (iy < 0 || iy >= l.in_h) continue;
        for (int kx = 0; kx < l.kw; ++kx) {
          int ix = ox * l.stride - l.pad + kx;
          if (ix < 0 || ix >= l.in_w) continue;
          const uint8_t* src = in + (int64_t(iy) * l.in_w + ix) * l.cin;
          int64_t wrow = (int64_t(ky) * l.kw + kx) * l.cin;
          for (int ci = 0; ci < l.cin; ++ci) {
            uint8_t x = src[ci];
            if (!x) continue;
            const uint8_t* wr = w.values.data() + (wrow + ci) * w.cols;
            for (int co = 0; co < l.cout; ++co)
              dst[co] += int64_t(x) * wr[co];
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Tensor> forward(const NetworkSpec& net,
                            const std::vector<WeightMatrix>& weights,
                            const uint8_t* image,
                            const std::vector<QuantParams>& quant) {
  std::vector<Tensor> outputs;
  outputs.reserve(net.layers.size());
  std::vector<uint8_t> cur(image, image + net.layers[0].input_elems());
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const LayerSpec& l = net.layers[li];
    std::vector<int64_t> psums = layer_psums(l, weights[li], cur.data());
    Tensor t;
    if (l.kind == LayerKind::conv)
      t.shape = {l.out_h(), l.out_w(), l.cout};
    else
      t.shape = {l.out_features};
    t.data.resize(psums.size());
    for (size_t i = 0; i < psums.size(); ++i)
      t.data[i] = vector_unit_finalize(psums[i], quant[li]);
    cur = t.data;
    outputs.push_back(std::move(t));
  }
  return outputs;
}

std::vector<QuantParams> calibrate_quant(const NetworkSpec& net,
                                         const std::vector<WeightMatrix>& weights,
                                         const ActivationTrace& trace,
                                         int64_t sample_images) {
  int64_t sample = std::min<int64_t>(sample_images, trace.images);
  std::vector<QuantParams> quant(net.layers.size());
  std::vector<int64_t> max_psum(net.layers.size(), 0);
  for (int64_t m = 0; m < sample; ++m) {
    std::vector<uint8_t> cur(trace.image_data(0, m),
                             trace.image_data(0, m) +
                                 net.layers[0].input_elems());
    for (size_t li = 0; li < net.layers.size(); ++li) {
      std::vector<int64_t> psums =
          layer_psums(net.layers[li], weights[li], cur.data());
      for (int64_t v : psums) max_psum[li] = std::max(max_psum[li], v);
      cur.resize(psums.size());
      // Quantize with the running max so deeper layers see plausible inputs.
      QuantParams q;
      q.scale = max_psum[li] > 0 ? 255.0 / static_cast<double>(max_psum[li])
                                 : 1.0;
      for (size_t i = 0; i < psums.size(); ++i)
        cur[i] = vector_unit_finalize(psums[i], q);
    }
  }
  for (size_t li = 0; li < net.layers.size(); ++li)
    quant[li].scale =
        max_psum[li] > 0 ? 255.0 / static_cast<double>(max_psum[li]) : 1.0;
  return quant;
}

namespace {

// Min over assignments of patches to one identity's instances of the max
// instance sum.
uint64_t identity_opt(const std::vector<uint64_t>& costs, int dups,
                      size_t idx, std::vector<uint64_t>& loads,
                      uint64_t best) {
  if (idx == costs.size()) {
    uint64_t worst = 0;
    for (uint64_t l : loads) worst = std::max(worst, l);
    return std::min(best, worst);
  }
  for (int i = 0; i < dups; ++i) {
    loads[static_cast<size_t>(i)] += costs[idx];
    if (loads[static_cast<size_t>(i)] < best)
      best = identity_opt(costs, dups, idx + 1, loads, best);
    loads[static_cast<size_t>(i)] -= costs[idx];
  }
  return best;
}

}  // namespace

uint64_t makespan_blockwise_opt(const std::vector<std::vector<uint64_t>>& costs,
                                const std::vector<int>& dups) {
  if (costs.size() > 3 || costs.size() != dups.size())
    throw ValidationError("makespan oracle limited to 3 blocks");
  uint64_t makespan = 0;
  for (size_t g = 0; g < costs.size(); ++g) {
    if (costs[g].size() > 4 || dups[g] < 1 || dups[g] > 3)
      throw ValidationError(
          "makespan oracle limited to 4 patches, 3 duplicates");
    std::vector<uint64_t> loads(static_cast<size_t>(dups[g]), 0);
    uint64_t best = identity_opt(costs[g], dups[g], 0, loads,
                                 std::numeric_limits<uint64_t>::max());
    makespan = std::max(makespan, best);
  }
  return makespan;
}

uint64_t makespan_layerwise_d1(
    const std::vector<std::vector<uint64_t>>& costs) {
  if (costs.empty()) return 0;
  size_t patches = costs[0].size();
  uint64_t total = 0;
  for (size_t p = 0; p < patches; ++p) {
    uint64_t worst = 0;
    for (const auto& g : costs) worst = std::max(worst, g[p]);
    total += worst;
  }
  return total;
}

}  // namespace oracle
}  // namespace cimsim
