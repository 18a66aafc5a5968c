#include <doctest.h>

#include <algorithm>

#include "cimsim/dataflow.hpp"
#include "cimsim/io.hpp"
#include "cimsim/oracle.hpp"
#include "cimsim/prng.hpp"
#include "cimsim/report.hpp"
#include "testutil.hpp"

using namespace cimsim;
using namespace testutil;

namespace {

// A network whose single layer is one 128-row block per 128 input features.
// Feeding feature groups density 0 or 1 gives exact per-block costs.
struct MicroSetup {
  NetworkSpec net;
  ActivationTrace trace;
  ArrayConfig cfg;
  ChipConfig chip;
};

MicroSetup two_block_micro(int images = 1) {
  MicroSetup s;
  s.net = one_layer(fc(256, 16));  // blocks: rows 0..127 and 128..255
  Tensor t;
  t.shape = {images, 256};
  t.data.assign(static_cast<size_t>(images) * 256, 0);
  for (int m = 0; m < images; ++m)
    for (int i = 128; i < 256; ++i)
      t.data[static_cast<size_t>(m) * 256 + i] = 255;  // block 1 fully dense
  s.trace.images = images;
  s.trace.layer_inputs.push_back(std::move(t));
  s.chip.pe_count = 1;
  s.chip.sim_mode = SimMode::timing;
  return s;
}

SimInputs inputs_of(const MicroSetup& s, const Allocation* alloc = nullptr) {
  SimInputs in;
  in.net = &s.net;
  in.acfg = &s.cfg;
  in.chip = &s.chip;
  in.trace = &s.trace;
  in.allocation = alloc;
  return in;
}

Allocation manual_block_alloc(const std::vector<Block>& blocks,
                              const std::vector<int>& dups) {
  Allocation a;
  a.policy = AllocPolicy::block;
  for (const auto& b : blocks) {
    AllocUnit u;
    u.id = b.block_id;
    u.block_id = b.block_id;
    u.layer_index = b.layer_index;
    u.cost = b.width_arrays;
    u.load = 1;
    a.units.push_back(u);
    a.arrays_used += int64_t(dups[static_cast<size_t>(b.block_id)]) *
                     b.width_arrays;
  }
  a.duplicates = dups;
  a.arrays_budget = 64;
  return a;
}

}  // namespace

TEST_CASE("single all-ones block saturates one array") {
  MicroSetup s;
  s.net = one_layer(fc(128, 16));
  Tensor t;
  t.shape = {1, 128};
  t.data.assign(128, 255);
  s.trace.images = 1;
  s.trace.layer_inputs.push_back(std::move(t));
  s.chip.pe_count = 1;
  s.chip.sim_mode = SimMode::timing;

  for (Dataflow df : {Dataflow::layerwise, Dataflow::blockwise}) {
    s.chip.dataflow = df;
    SimReport rep = simulate(inputs_of(s));
    CHECK(rep.makespan_cycles == 1024);
    CHECK(rep.layers[0].utilization == doctest::Approx(1.0));
  }
}

TEST_CASE("barrier pins the fast block to the slow one") {
  MicroSetup s = two_block_micro();
  s.chip.dataflow = Dataflow::layerwise;
  SimReport rep = simulate(inputs_of(s));
  CHECK(rep.makespan_cycles == 1024);
  REQUIRE(rep.instances.size() == 2);
  const InstanceReport& fast = rep.instances[0];
  CHECK(fast.busy_cycles == 64);
  double util = static_cast<double>(fast.busy_cycles) /
                static_cast<double>(rep.makespan_cycles);
  CHECK(util == doctest::Approx(0.0625));
  CHECK(fast.stall_cycles == rep.makespan_cycles - 64);
}

TEST_CASE("doubling duplicates halves the makespan within one patch time") {
  // One layer, one block, many patches of equal cost.
  NetworkSpec net = one_layer(conv(1, 1, 128, 16, 1, 0, 8, 8));  // 64 patches
  ActivationTrace t = gen_synthetic_trace(net, {1.0}, 1, 1);
  ArrayConfig cfg;
  ChipConfig chip;
  chip.pe_count = 1;
  chip.sim_mode = SimMode::timing;
  chip.dataflow = Dataflow::layerwise;
  chip.allocation_policy = AllocPolicy::perf_layer;

  auto blocks = enumerate_blocks(net, cfg);
  SimInputs in;
  in.net = &net;
  in.acfg = &cfg;
  in.chip = &chip;
  in.trace = &t;

  Allocation d1 = manual_block_alloc(blocks, {1});
  d1.policy = AllocPolicy::perf_layer;  // uniform per layer, layerwise-legal
  in.allocation = &d1;
  uint64_t m1 = simulate(in).makespan_cycles;

  Allocation d2 = manual_block_alloc(blocks, {2});
  d2.policy = AllocPolicy::perf_layer;
  in.allocation = &d2;
  uint64_t m2 = simulate(in).makespan_cycles;

  CHECK(m1 == 64 * 1024);
  CHECK(m2 == m1 / 2);
}

TEST_CASE("blockwise equals layerwise when costs are per-block constant") {
  MicroSetup s = two_block_micro(2);  // densities 0 and 1, 1 patch per image
  s.chip.dataflow = Dataflow::layerwise;
  uint64_t lw = simulate(inputs_of(s)).makespan_cycles;
  s.chip.dataflow = Dataflow::blockwise;
  uint64_t bw = simulate(inputs_of(s)).makespan_cycles;
  CHECK(lw == 2048);
  CHECK(bw == 2048);  // slow block pipelines back to back either way
}

TEST_CASE("duplicating only the slow block beats the barrier") {
  // 4 images, 1 patch each: blockwise with the dense block duplicated
  // approaches 2x1024; layerwise with both blocks duplicated matches it.
  MicroSetup s = two_block_micro(4);
  ArrayConfig cfg;
  auto blocks = enumerate_blocks(s.net, cfg);

  s.chip.dataflow = Dataflow::blockwise;
  Allocation bw_alloc = manual_block_alloc(blocks, {1, 2});
  SimReport bw = simulate(inputs_of(s, &bw_alloc));
  CHECK(bw.makespan_cycles == 2048);

  s.chip.dataflow = Dataflow::layerwise;
  Allocation lw_alloc = manual_block_alloc(blocks, {2, 2});
  lw_alloc.policy = AllocPolicy::perf_layer;
  SimReport lw = simulate(inputs_of(s, &lw_alloc));
  CHECK(lw.makespan_cycles >= bw.makespan_cycles);
  // Blockwise spent 3 arrays; layerwise needed 4 for the same makespan.
  CHECK(bw_alloc.arrays_used == 3);
  CHECK(lw_alloc.arrays_used == 4);
}

TEST_CASE("block allocation cannot drive the layerwise engine") {
  MicroSetup s = two_block_micro();
  ArrayConfig cfg;
  auto blocks = enumerate_blocks(s.net, cfg);
  Allocation a = manual_block_alloc(blocks, {1, 2});
  s.chip.dataflow = Dataflow::layerwise;
  SimInputs in = inputs_of(s, &a);
  CHECK_THROWS_AS(run_layerwise(in), ValidationError);
}

namespace {

struct RandomCase {
  NetworkSpec net;
  ActivationTrace trace;
  std::vector<WeightMatrix> weights;
  std::vector<QuantParams> quant;
};

RandomCase random_case(Prng& rng, int max_layers = 4, int max_channels = 16) {
  RandomCase rc;
  rc.net = random_small_network(rng, max_layers, max_channels);
  std::vector<double> dens;
  for (size_t i = 0; i < rc.net.layers.size(); ++i)
    dens.push_back(0.05 + 0.6 * rng.next_double());
  rc.trace = gen_synthetic_trace(rc.net, dens, 2, rng.next());
  rc.weights = gen_weights(rc.net, rng.next());
  rc.quant = oracle::calibrate_quant(rc.net, rc.weights, rc.trace);
  return rc;
}

}  // namespace

TEST_CASE("functional outputs are invariant across engines, modes, policies") {
  Prng rng = Prng::stream(99, "invariance");
  ArrayConfig cfg;
  cfg.arrays_per_pe = 16;

  for (int trial = 0; trial < 5; ++trial) {
    RandomCase rc = random_case(rng);
    auto maps = map_network(rc.net, cfg);
    auto blocks = enumerate_blocks(rc.net, cfg);
    ActivationTrace& t = rc.trace;
    CostModel cm = profile_blocks(rc.net, t, cfg, maps, blocks,
                                  ProfileMode::exact, ScanMode::zeroskip, 2);

    std::vector<std::vector<uint8_t>> reference;
    for (int64_t m = 0; m < t.images; ++m)
      reference.push_back(
          oracle::forward(rc.net, rc.weights, t.image_data(0, m), rc.quant)
              .back()
              .data);

    ChipConfig chip;
    chip.pe_count = 16;
    chip.sim_mode = SimMode::functional;
    for (AllocPolicy pol :
         {AllocPolicy::weight, AllocPolicy::perf_layer, AllocPolicy::block}) {
      for (Dataflow df : {Dataflow::layerwise, Dataflow::blockwise}) {
        if (pol == AllocPolicy::block && df == Dataflow::layerwise) continue;
        for (ScanMode mode : {ScanMode::zeroskip, ScanMode::baseline}) {
          chip.allocation_policy = pol;
          chip.dataflow = df;
          chip.mode = mode;
          Allocation alloc =
              allocate(rc.net, maps, blocks, &cm, pol, cfg, chip);
          SimInputs in;
          in.net = &rc.net;
          in.acfg = &cfg;
          in.chip = &chip;
          in.trace = &t;
          in.allocation = &alloc;
          in.weights = &rc.weights;
          in.quant = &rc.quant;
          SimReport rep = simulate(in);
          REQUIRE(rep.final_activations.size() ==
                  static_cast<size_t>(t.images));
          for (int64_t m = 0; m < t.images; ++m)
            CHECK(rep.final_activations[static_cast<size_t>(m)] ==
                  reference[static_cast<size_t>(m)]);
        }
      }
    }
  }
}

TEST_CASE("psum packet conservation") {
  Prng rng = Prng::stream(101, "packets");
  ArrayConfig cfg;
  cfg.arrays_per_pe = 16;
  RandomCase rc = random_case(rng);
  auto maps = map_network(rc.net, cfg);
  auto blocks = enumerate_blocks(rc.net, cfg);

  int64_t expected = 0;
  for (const auto& b : blocks)
    expected += rc.trace.images *
                maps[static_cast<size_t>(b.layer_index)].patches_per_image;

  ChipConfig chip;
  chip.pe_count = 16;
  chip.sim_mode = SimMode::timing;
  for (Dataflow df : {Dataflow::layerwise, Dataflow::blockwise}) {
    chip.dataflow = df;
    SimInputs in;
    in.net = &rc.net;
    in.acfg = &cfg;
    in.chip = &chip;
    in.trace = &rc.trace;
    SimReport rep = simulate(in);
    CHECK(rep.psum_packets == static_cast<uint64_t>(expected));
    CHECK(rep.input_packets == static_cast<uint64_t>(expected));
  }
}

TEST_CASE("utilization bounds and stall accounting") {
  Prng rng = Prng::stream(103, "utils");
  ArrayConfig cfg;
  cfg.arrays_per_pe = 16;
  for (int trial = 0; trial < 3; ++trial) {
    RandomCase rc = random_case(rng);
    ChipConfig chip;
    chip.pe_count = 16;
    chip.sim_mode = SimMode::timing;
    chip.dataflow = Dataflow::blockwise;
    SimInputs in;
    in.net = &rc.net;
    in.acfg = &cfg;
    in.chip = &chip;
    in.trace = &rc.trace;
    SimReport rep = simulate(in);
    for (const auto& l : rep.layers) {
      CHECK(l.utilization >= 0.0);
      CHECK(l.utilization <= 1.0);
    }
    for (const auto& i : rep.instances)
      CHECK(i.busy_cycles + i.stall_cycles == rep.makespan_cycles);
  }
}

TEST_CASE("blockwise dominates layerwise with duplicates somewhere") {
  Prng rng = Prng::stream(107, "dominance");
  ArrayConfig cfg;
  cfg.arrays_per_pe = 32;
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    // 2-3 blocks via the fc row count; heterogeneous densities.
    int grid_rows = 2 + static_cast<int>(rng.next_below(2));
    int rows = grid_rows * 128;
    int outs = 4 + static_cast<int>(rng.next_below(12));
    NetworkSpec net = one_layer(fc(rows, outs));
    Tensor tensor;
    int64_t images = 2 + static_cast<int64_t>(rng.next_below(3));
    tensor.shape = {images, rows};
    tensor.data.resize(static_cast<size_t>(images * rows));
    for (auto& v : tensor.data) {
      uint8_t byte = 0;
      for (int b = 0; b < 8; ++b)
        if (rng.next_bool(0.3)) byte |= static_cast<uint8_t>(1u << b);
      v = byte;
    }
    ActivationTrace t;
    t.images = images;
    t.layer_inputs.push_back(std::move(tensor));

    auto blocks = enumerate_blocks(net, cfg);
    int d = 2 + static_cast<int>(rng.next_below(2));
    std::vector<int> dups(blocks.size(), d);  // uniform so layerwise is legal

    Allocation alloc = manual_block_alloc(blocks, dups);
    alloc.policy = AllocPolicy::perf_layer;

    ChipConfig chip;
    chip.pe_count = 4;
    chip.sim_mode = SimMode::timing;
    SimInputs in;
    in.net = &net;
    in.acfg = &cfg;
    in.chip = &chip;
    in.trace = &t;
    in.allocation = &alloc;

    chip.dataflow = Dataflow::layerwise;
    uint64_t lw = run_layerwise(in).makespan_cycles;
    chip.dataflow = Dataflow::blockwise;
    uint64_t bw = run_blockwise(in).makespan_cycles;
    CHECK(bw <= lw);
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("reports are deterministic") {
  Prng rng = Prng::stream(109, "determinism");
  RandomCase rc = random_case(rng);
  ArrayConfig cfg;
  cfg.arrays_per_pe = 16;
  ChipConfig chip;
  chip.pe_count = 16;
  chip.sim_mode = SimMode::functional;
  chip.dataflow = Dataflow::blockwise;
  SimInputs in;
  in.net = &rc.net;
  in.acfg = &cfg;
  in.chip = &chip;
  in.trace = &rc.trace;
  in.weights = &rc.weights;
  in.quant = &rc.quant;
  std::string a = sim_report_to_json(simulate(in)).dump();
  std::string b = sim_report_to_json(simulate(in)).dump();
  CHECK(a == b);
}

TEST_CASE("psum_pipelined relaxes the barrier without changing outputs") {
  Prng rng = Prng::stream(113, "pipelined");
  RandomCase rc = random_case(rng);
  ArrayConfig cfg;
  cfg.arrays_per_pe = 16;
  ChipConfig chip;
  chip.pe_count = 16;
  chip.sim_mode = SimMode::functional;
  chip.dataflow = Dataflow::layerwise;

  SimInputs in;
  in.net = &rc.net;
  in.acfg = &cfg;
  in.chip = &chip;
  in.trace = &rc.trace;
  in.weights = &rc.weights;
  in.quant = &rc.quant;

  SimReport strict = simulate(in);
  chip.psum_pipelined = true;
  SimReport relaxed = simulate(in);
  CHECK(relaxed.makespan_cycles <= strict.makespan_cycles);
  CHECK(relaxed.final_activations == strict.final_activations);
}
