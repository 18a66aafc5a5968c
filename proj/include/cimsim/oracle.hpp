#pragma once

#include <cstdint>
#include <vector>

#include "cimsim/model.hpp"

namespace cimsim {

// Per-layer vector-unit parameters: out = clamp(round((psum + bias) * scale)).
struct QuantParams {
  int64_t bias = 0;
  double scale = 1.0;
};

uint8_t vector_unit_finalize(int64_t psum, const QuantParams& q);

namespace oracle {

// Plain integer forward pass: direct convolution / dense loops plus the same
// vector-unit finalize. Shares no code with the bit-serial array path.
// Returns every layer's output activations for one image.
std::vector<Tensor> forward(const NetworkSpec& net,
                            const std::vector<WeightMatrix>& weights,
                            const uint8_t* image,
                            const std::vector<QuantParams>& quant);

// Picks each layer's scale so the sample's largest pre-quantization sum maps
// to 255, walking the sample images layer by layer. Biases stay 0.
std::vector<QuantParams> calibrate_quant(const NetworkSpec& net,
                                         const std::vector<WeightMatrix>& weights,
                                         const ActivationTrace& trace,
                                         int64_t sample_images = 4);

// Minimum blockwise makespan of a tiny instance by exhaustive enumeration of
// patch-to-instance assignments. costs[g][p] is block identity g's cycle cost
// on patch p; dups[g] its instance count. Guarded to <= 3 blocks,
// <= 3 duplicates, <= 4 patches.
uint64_t makespan_blockwise_opt(const std::vector<std::vector<uint64_t>>& costs,
                                const std::vector<int>& dups);

// Single-copy layerwise reference: patches run back to back, each synchronized
// to its slowest block.
uint64_t makespan_layerwise_d1(const std::vector<std::vector<uint64_t>>& costs);

}  // namespace oracle

}  // namespace cimsim
