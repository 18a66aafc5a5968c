#include <doctest.h>

#include <filesystem>

#include "cimsim/io.hpp"
#include "cimsim/model.hpp"
#include "cimsim/stats.hpp"
#include "testutil.hpp"

using namespace cimsim;
using namespace testutil;

TEST_CASE("array config defaults") {
  ArrayConfig c;
  CHECK(c.array_rows == 128);
  CHECK(c.array_cols == 128);
  CHECK(c.adc_bits == 3);
  CHECK(c.cols_per_adc == 8);
  CHECK(c.input_bits == 8);
  CHECK(c.weight_bits == 8);
  CHECK(c.arrays_per_pe == 64);
  CHECK(c.min_read_per_plane);
  CHECK(c.clock_hz == doctest::Approx(1e8));
  CHECK(c.rows_per_read() == 8);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("array config invariants") {
  ArrayConfig c;
  c.cols_per_adc = 7;  // does not divide 128
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = ArrayConfig{};
  c.adc_bits = 8;  // 256 rows per read > 128 rows
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("load_network on the resnet18 fixture") {
  NetworkSpec net = load_network(fixture_path("resnet18.json"));
  int convs = 0, fcs = 0;
  for (const auto& l : net.layers)
    (l.kind == LayerKind::conv ? convs : fcs) += 1;
  CHECK(convs == 20);
  CHECK(fcs == 1);
}

TEST_CASE("single fc network") {
  Json j;
  j["name"] = "onefc";
  j["layers"] = Json::array({Json{{"kind", "fc"}, {"in", 128}, {"out", 16}}});
  NetworkSpec net = network_from_json(j);
  CHECK(net.layers.size() == 1);
  CHECK(net.layers[0].in_features == 128);
}

TEST_CASE("conv output dims use floor division") {
  // stride 3 on 8x8, kernel 3, no padding: (8-3)/3+1 = 2
  LayerSpec l = conv(3, 3, 2, 4, 3, 0, 8, 8);
  CHECK_NOTHROW(l.validate(0));
  CHECK(l.out_h() == 2);
  CHECK(l.out_w() == 2);
  // Kernel larger than the padded input is rejected.
  LayerSpec bad = conv(9, 9, 2, 4, 1, 0, 8, 8);
  CHECK_THROWS_AS(bad.validate(0), ValidationError);
}

TEST_CASE("chain mismatch names the offending layer") {
  NetworkSpec net;
  net.name = "bad";
  net.layers.push_back(conv(3, 3, 3, 8, 1, 1, 6, 6));
  net.layers.push_back(conv(3, 3, 4, 8, 1, 1, 6, 6));  // cin should be 8
  try {
    net.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
  }
}

TEST_CASE("synthetic trace densities") {
  NetworkSpec net = one_layer(fc(100, 10));
  SUBCASE("density 0 gives all zeros") {
    ActivationTrace t = gen_synthetic_trace(net, {0.0}, 2, 1);
    for (uint8_t v : t.layer_inputs[0].data) CHECK(v == 0);
  }
  SUBCASE("density 1 gives all 255") {
    ActivationTrace t = gen_synthetic_trace(net, {1.0}, 2, 1);
    for (uint8_t v : t.layer_inputs[0].data) CHECK(v == 255);
  }
  SUBCASE("density out of range") {
    CHECK_THROWS_AS(gen_synthetic_trace(net, {1.5}, 1, 1), ValidationError);
  }
  SUBCASE("density length must match layer count") {
    CHECK_THROWS_AS(gen_synthetic_trace(net, {0.5, 0.5}, 1, 1),
                    ValidationError);
  }
}

TEST_CASE("synthetic density concentrates at 1e6 elements") {
  NetworkSpec net = one_layer(fc(1000000, 10));
  ActivationTrace t = gen_synthetic_trace(net, {0.5}, 1, 3);
  CHECK(bit_density(t.layer_inputs[0]) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(bit_density(t.layer_inputs[0]) - 0.5) < 0.01);
}

TEST_CASE("synthetic trace is a pure function of its arguments") {
  NetworkSpec net = one_layer(conv(3, 3, 2, 4, 1, 1, 5, 5));
  ActivationTrace a = gen_synthetic_trace(net, {0.3}, 3, 11);
  ActivationTrace b = gen_synthetic_trace(net, {0.3}, 3, 11);
  ActivationTrace c = gen_synthetic_trace(net, {0.3}, 3, 12);
  CHECK(a.layer_inputs[0].data == b.layer_inputs[0].data);
  CHECK(a.layer_inputs[0].data != c.layer_inputs[0].data);
}

TEST_CASE("trace write/load round trip is bit exact") {
  NetworkSpec net;
  net.name = "rt";
  net.layers.push_back(conv(3, 3, 2, 4, 1, 1, 5, 5));
  net.layers.push_back(fc(100, 7));
  net.validate();
  ActivationTrace t = gen_synthetic_trace(net, {0.4, 0.2}, 3, 5);

  auto dir = std::filesystem::temp_directory_path() / "cimsim_rt_test";
  std::filesystem::remove_all(dir);
  std::string manifest = (dir / "trace.json").string();
  write_trace(t, net, manifest);
  ActivationTrace back = load_trace(manifest, net);
  REQUIRE(back.layer_inputs.size() == t.layer_inputs.size());
  CHECK(back.images == t.images);
  for (size_t i = 0; i < t.layer_inputs.size(); ++i) {
    CHECK(back.layer_inputs[i].shape == t.layer_inputs[i].shape);
    CHECK(back.layer_inputs[i].data == t.layer_inputs[i].data);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_trace rejects bad manifests") {
  NetworkSpec net;
  net.name = "rt";
  net.layers.push_back(conv(3, 3, 2, 4, 1, 1, 5, 5));
  net.layers.push_back(fc(100, 7));
  net.validate();
  ActivationTrace t = gen_synthetic_trace(net, {0.4, 0.2}, 2, 5);

  auto dir = std::filesystem::temp_directory_path() / "cimsim_badtrace";
  std::filesystem::remove_all(dir);
  std::string manifest = (dir / "trace.json").string();
  Json written = write_trace(t, net, manifest);

  SUBCASE("blob shorter than shape product") {
    // Truncate one blob.
    auto blob = dir / written["layers"][0]["file"].get<std::string>();
    std::filesystem::resize_file(blob, 10);
    CHECK_THROWS_AS(load_trace(manifest, net), ValidationError);
  }
  SUBCASE("manifest layer count mismatch") {
    Json j = written;
    j["layers"].erase(1);
    save_json_atomic(manifest, j);
    CHECK_THROWS_AS(load_trace(manifest, net), ValidationError);
  }
  SUBCASE("image count enforced as two images") {
    CHECK(t.images == 2);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("weights are seeded per layer and masked to weight_bits") {
  NetworkSpec net;
  net.name = "w";
  net.layers.push_back(conv(1, 1, 2, 3, 1, 0, 2, 2));
  net.layers.push_back(conv(1, 1, 3, 3, 1, 0, 2, 2));
  net.validate();
  auto w1 = gen_weights(net, 9);
  auto w2 = gen_weights(net, 9);
  auto w3 = gen_weights(net, 10);
  CHECK(w1[0].values == w2[0].values);
  CHECK(w1[0].values != w3[0].values);
  CHECK(w1[0].values != w1[1].values);  // different stream per layer

  auto w4 = gen_weights(net, 9, 4);
  for (uint8_t v : w4[0].values) CHECK(v < 16);
}
