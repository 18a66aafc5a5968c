#include <doctest.h>

#include "cimsim/dataflow.hpp"
#include "cimsim/oracle.hpp"
#include "cimsim/prng.hpp"
#include "testutil.hpp"

using namespace cimsim;
using namespace testutil;

TEST_CASE("vector unit finalize") {
  CHECK(vector_unit_finalize(0, {0, 1.0}) == 0);
  CHECK(vector_unit_finalize(300, {0, 1.0}) == 255);  // clamp
  CHECK(vector_unit_finalize(100, {-50, 0.5}) == 25);
  CHECK(vector_unit_finalize(10, {-50, 1.0}) == 0);  // negative clamps to 0
}

TEST_CASE("identity 1x1 conv reproduces its input") {
  NetworkSpec net = one_layer(conv(1, 1, 3, 3, 1, 0, 4, 4));
  std::vector<WeightMatrix> w(1);
  w[0].rows = 3;
  w[0].cols = 3;
  w[0].values = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::vector<QuantParams> q(1);
  std::vector<uint8_t> img(48);
  for (size_t i = 0; i < img.size(); ++i) img[i] = static_cast<uint8_t>(i * 5);
  auto out = oracle::forward(net, w, img.data(), q);
  CHECK(out[0].data == img);
}

TEST_CASE("zero weights give zero outputs") {
  NetworkSpec net = one_layer(conv(3, 3, 2, 4, 1, 1, 4, 4));
  std::vector<WeightMatrix> w(1);
  w[0].rows = 18;
  w[0].cols = 4;
  w[0].values.assign(18 * 4, 0);
  std::vector<QuantParams> q(1);
  std::vector<uint8_t> img(32, 200);
  auto out = oracle::forward(net, w, img.data(), q);
  for (uint8_t v : out[0].data) CHECK(v == 0);
}

TEST_CASE("calibration maps the sample maximum to 255") {
  NetworkSpec net = one_layer(fc(16, 4));
  ActivationTrace t = gen_synthetic_trace(net, {0.5}, 2, 3);
  auto w = gen_weights(net, 3);
  auto q = oracle::calibrate_quant(net, w, t);
  uint8_t max_out = 0;
  for (int64_t m = 0; m < t.images; ++m) {
    auto out = oracle::forward(net, w, t.image_data(0, m), q);
    for (uint8_t v : out[0].data) max_out = std::max(max_out, v);
  }
  CHECK(max_out == 255);
}

TEST_CASE("tiny makespan oracles") {
  SUBCASE("one instance runs patches back to back") {
    CHECK(oracle::makespan_blockwise_opt({{10, 20}}, {1}) == 30);
  }
  SUBCASE("two duplicates split four equal patches") {
    CHECK(oracle::makespan_blockwise_opt({{10, 10, 10, 10}}, {2}) == 20);
  }
  SUBCASE("barrier reference takes the max per patch") {
    CHECK(oracle::makespan_layerwise_d1({{10, 10}, {30, 30}}) == 60);
    CHECK(oracle::makespan_layerwise_d1({{10, 30}, {30, 10}}) == 60);
  }
  SUBCASE("guards reject big instances") {
    CHECK_THROWS_AS(
        oracle::makespan_blockwise_opt({{1, 1, 1, 1, 1}}, {1}),
        ValidationError);
    CHECK_THROWS_AS(
        oracle::makespan_blockwise_opt({{1}, {1}, {1}, {1}},
                                       {1, 1, 1, 1}),
        ValidationError);
  }
}

TEST_CASE("uneven costs find the balanced split") {
  // Patches 9, 7, 5, 3 on two instances: best split is {9,3} vs {7,5} = 12.
  CHECK(oracle::makespan_blockwise_opt({{9, 7, 5, 3}}, {2}) == 12);
}

TEST_CASE("engine blockwise dispatch is near the exhaustive optimum") {
  // One fc layer, one block identity, duplicated; patch costs vary with the
  // per-image input. The FIFO dispatch must stay within 1.25x of optimum.
  ArrayConfig cfg;
  cfg.array_rows = 16;
  cfg.array_cols = 16;
  cfg.adc_bits = 2;
  cfg.cols_per_adc = 4;
  cfg.weight_bits = 8;
  cfg.arrays_per_pe = 8;
  cfg.validate();
  Prng rng = Prng::stream(71, "near_opt");

  for (int trial = 0; trial < 20; ++trial) {
    NetworkSpec net = one_layer(conv(1, 1, 16, 4, 1, 0, 2, 2));  // 4 patches
    int dups = 2 + static_cast<int>(rng.next_below(2));
    double density = 0.1 + 0.8 * rng.next_double();
    ActivationTrace t = gen_synthetic_trace(
        net, {density}, 1, 100 + static_cast<uint64_t>(trial));

    // Reference per-patch costs.
    auto maps = map_network(net, cfg);
    auto blocks = enumerate_blocks(net, cfg);
    REQUIRE(blocks.size() == 1);
    std::vector<uint64_t> costs;
    auto patches = im2col_patches(net.layers[0], t.image_data(0, 0));
    for (auto& p : patches) {
      p.resize(static_cast<size_t>(cfg.array_rows), 0);
      BitPlanes planes = build_bitplanes(p.data(), cfg.array_rows, 8);
      costs.push_back(cycles_from_planes(planes, ScanMode::zeroskip, cfg).cycles);
    }
    uint64_t opt = oracle::makespan_blockwise_opt({costs},
                                                  {dups});

    Allocation alloc;
    alloc.policy = AllocPolicy::block;
    AllocUnit u;
    u.id = 0;
    u.block_id = 0;
    u.layer_index = 0;
    u.cost = 1;
    u.load = 1;
    alloc.units = {u};
    alloc.duplicates = {dups};
    alloc.arrays_used = dups;
    alloc.arrays_budget = 8;

    ChipConfig chip;
    chip.pe_count = 1;
    chip.sim_mode = SimMode::timing;
    chip.dataflow = Dataflow::blockwise;
    SimInputs in;
    in.net = &net;
    in.acfg = &cfg;
    in.chip = &chip;
    in.trace = &t;
    in.allocation = &alloc;
    SimReport rep = run_blockwise(in);
    CHECK(rep.makespan_cycles >= opt);
    CHECK(static_cast<double>(rep.makespan_cycles) <=
          1.25 * static_cast<double>(opt));
  }
}
