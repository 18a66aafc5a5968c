#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cimsim/common.hpp"

namespace cimsim {

enum class LayerKind { conv, fc };
enum class AllocPolicy { weight, perf_layer, block };
enum class Dataflow { layerwise, blockwise };
enum class ScanMode { zeroskip, baseline };
enum class SimMode { functional, timing };

const char* to_string(LayerKind k);
const char* to_string(AllocPolicy p);
const char* to_string(Dataflow d);
const char* to_string(ScanMode m);
const char* to_string(SimMode m);
AllocPolicy alloc_policy_from_string(const std::string& s);
Dataflow dataflow_from_string(const std::string& s);
ScanMode scan_mode_from_string(const std::string& s);
SimMode sim_mode_from_string(const std::string& s);

// One layer of the network. Conv layers carry their own input spatial dims so
// the chain can be validated link by link; fc layers are a single flat patch.
struct LayerSpec {
  LayerKind kind = LayerKind::conv;
  // conv fields
  int kh = 0, kw = 0, cin = 0, cout = 0;
  int stride = 1, pad = 0;
  int in_h = 0, in_w = 0;
  // fc fields
  int64_t in_features = 0, out_features = 0;

  int out_h() const { return (in_h + 2 * pad - kh) / stride + 1; }
  int out_w() const { return (in_w + 2 * pad - kw) / stride + 1; }

  // Rows of the vectorized filter matrix (one entry per input of a patch).
  int64_t matrix_rows() const {
    return kind == LayerKind::conv ? int64_t(kh) * kw * cin : in_features;
  }
  int64_t out_channels() const {
    return kind == LayerKind::conv ? cout : out_features;
  }
  int64_t patches_per_image() const {
    return kind == LayerKind::conv ? int64_t(out_h()) * out_w() : 1;
  }
  int64_t input_elems() const {
    return kind == LayerKind::conv ? int64_t(in_h) * in_w * cin : in_features;
  }
  int64_t output_elems() const {
    return kind == LayerKind::conv ? int64_t(out_h()) * out_w() * cout
                                   : out_features;
  }
  int64_t macs_per_image() const {
    return patches_per_image() * matrix_rows() * out_channels();
  }

  void validate(int index) const;
};

struct NetworkSpec {
  std::string name;
  std::vector<LayerSpec> layers;

  // Checks per-layer invariants and that each layer's input shape equals the
  // predecessor's output shape (fc consumes the flattened conv output).
  void validate() const;
  int64_t total_macs_per_image() const;
};

// Dense u8 tensor, row-major. Conv activations are laid out [h][w][c]; traces
// carry a leading image dimension.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<uint8_t> data;

  int64_t elems() const {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
  }
};

// Per-layer input tensors for a stream of images. Every layer is present;
// functional simulation reads only layer 0, timing-only simulation and
// profiling read all of them.
struct ActivationTrace {
  int64_t images = 0;
  std::vector<Tensor> layer_inputs;  // shape[0] == images for each layer

  // Pointer to image m's input for a layer (contiguous layer input_elems()).
  const uint8_t* image_data(int layer, int64_t image) const;
  void validate(const NetworkSpec& net) const;
};

struct ArrayConfig {
  int array_rows = 128;
  int array_cols = 128;
  int adc_bits = 3;
  int cols_per_adc = 8;
  int input_bits = 8;
  int weight_bits = 8;
  int arrays_per_pe = 64;
  bool min_read_per_plane = true;
  double clock_hz = 1e8;

  // Rows enabled per ADC conversion.
  int rows_per_read() const { return 1 << adc_bits; }
  // Mux steps an ADC performs to scan its column group; one batch read costs
  // this many cycles.
  int column_steps() const { return cols_per_adc; }
  int weights_per_array() const { return array_cols / weight_bits; }

  void validate() const;
};

struct ChipConfig {
  int pe_count = 1;
  AllocPolicy allocation_policy = AllocPolicy::weight;
  Dataflow dataflow = Dataflow::layerwise;
  int interlayer_buffer_images = 1;
  int64_t pipeline_images = 0;  // 0: run every trace image
  int64_t warmup_images = 0;    // excluded from the measured window
  ScanMode mode = ScanMode::zeroskip;
  SimMode sim_mode = SimMode::functional;
  bool fill_remainder = false;
  bool psum_pipelined = false;

  void validate() const;
};

// Seeded per-layer weight matrices (matrix_rows x out_channels, u8 values
// masked to weight_bits).
struct WeightMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<uint8_t> values;  // row-major

  uint8_t at(int64_t r, int64_t c) const { return values[r * cols + c]; }
};

std::vector<WeightMatrix> gen_weights(const NetworkSpec& net, uint64_t seed,
                                      int weight_bits = 8);

// Synthetic trace: each of the 8 bits of every element is drawn i.i.d. with
// the layer's requested density. Pure function of its arguments.
ActivationTrace gen_synthetic_trace(const NetworkSpec& net,
                                    const std::vector<double>& densities,
                                    int64_t images, uint64_t seed);

// Preset topologies ("resnet18-shape", "vgg11-shape", "resnet18", "vgg11").
NetworkSpec preset_network(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace cimsim
