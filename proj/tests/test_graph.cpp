// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bwx/executor.hpp"
#include "bwx/graph.hpp"
#include "bwx/weights.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bwx;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("generator stride product is 256 and lengths are preserved") {
  GraphSpec g = build_generator(4);
  CHECK(down_stride_product(g) == 256);
  CHECK(up_stride_product(g) == 256);

  WeightStore ws = init_weights(g, 11);
  BoundGraph<float> bg = bind_graph<float>(g, ws);
  auto out = run_offline(bg, testutil::random_fm<float>(1, 512, 12));
  CHECK(out.channels() == 1);
  CHECK(out.length() == 512);
}

TEST_CASE("generator internal conv weights scale exactly 16x between C and 4C") {
  const ParamCounts c8 = count_params(build_generator(8));
  const ParamCounts c32 = count_params(build_generator(32));
  CHECK(c8.internal_weights * 16 == c32.internal_weights);
  // Boundary convs scale linearly with the width instead.
  CHECK(c8.boundary_weights * 4 == c32.boundary_weights);
  CHECK(c8.norm_params == 0);
}

TEST_CASE("generator is end-to-end causal offline") {
  GraphSpec g = build_generator(2);
  WeightStore ws = init_weights(g, 21);
  BoundGraph<float> bg = bind_graph<float>(g, ws);
  auto x = testutil::random_fm<float>(1, 512, 22);
  auto y = run_offline(bg, x);

  auto flipped = x;
  const std::int64_t t = 300;
  flipped.at(0, t) += 0.5f;
  auto y2 = run_offline(bg, flipped);

  bool prefix_equal = true;
  for (std::int64_t i = 0; i < t; ++i) prefix_equal &= (y.at(0, i) == y2.at(0, i));
  CHECK(prefix_equal);
  // The flip must actually reach the output at or after t (waveform skip).
  CHECK(y.at(0, t) != y2.at(0, t));
}

TEST_CASE("discriminator channel progression hits the 1024 cap") {
  GraphSpec d = build_discriminator();
  std::vector<int> outs;
  for (const LayerSpec& l : d.layers) {
    if (l.kind == LayerKind::conv) outs.push_back(l.conv.out_channels);
  }
  // initial, four grouped, penultimate, logits
  CHECK(outs == std::vector<int>{16, 64, 256, 1024, 1024, 1024, 1});
  int taps = 0;
  for (const LayerSpec& l : d.layers) taps += l.feature_tap ? 1 : 0;
  CHECK(taps == 6);
}

TEST_CASE("discriminator logits scale linearly and come in three scales") {
  GraphSpec d = build_discriminator();
  WeightStore ws = init_multi_scale_weights(d, 31);

  AudioBuffer a(testutil::random_samples(2048, 32), 16000);
  AudioBuffer b(testutil::random_samples(4096, 33), 16000);
  DiscriminatorOutput oa = run_discriminator(d, ws, a);
  DiscriminatorOutput ob = run_discriminator(d, ws, b);

  REQUIRE(oa.logits.size() == 3);
  REQUIRE(ob.logits.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(ob.logits[k].size() == 2 * oa.logits[k].size());
    CHECK(oa.features[k].size() == 6);
    // Coarser input scales see shorter signals, hence fewer logits.
    if (k > 0) CHECK(oa.logits[k].size() < oa.logits[k - 1].size());
  }
}

TEST_CASE("weight init is deterministic and fan-in scaled") {
  GraphSpec g = build_generator(8);
  WeightStore a = init_weights(g, 42);
  WeightStore b = init_weights(g, 42);
  WeightStore c = init_weights(g, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);

  int checked = 0;
  for (const auto& [name, entry] : a) {
    if (name.size() < 2 || name.substr(name.size() - 2) != ".w") continue;
    if (entry.count() < 1000) continue;
    const double fan_in = double(entry.dims[1]) * entry.dims[2];
    const double target_std = std::sqrt(1.0 / fan_in) / std::sqrt(3.0);
    double sum = 0.0, sum2 = 0.0;
    for (float v : entry.values) {
      sum += v;
      sum2 += double(v) * v;
    }
    const double n = double(entry.count());
    const double stddev = std::sqrt(sum2 / n - (sum / n) * (sum / n));
    CHECK(stddev == doctest::Approx(target_std).epsilon(0.2));
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("weight files round-trip bit-identically") {
  GraphSpec g = testutil::toy_unet();
  WeightStore ws = init_weights(g, 7);
  const std::string p1 = tmp_path("bwx_w1.snwt");
  const std::string p2 = tmp_path("bwx_w2.snwt");
  save_weights(ws, p1);
  WeightStore back = load_weights(p1);
  CHECK(back == ws);
  save_weights(back, p2);

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(!b1.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("weight file rejects corrupt magic and version") {
  GraphSpec g = testutil::toy_unet();
  const std::string path = tmp_path("bwx_w3.snwt");
  save_weights(init_weights(g, 7), path);

  SUBCASE("magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(load_weights(path), FormatError);
  }
  SUBCASE("version") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const unsigned char v9[4] = {9, 0, 0, 0};
    f.write(reinterpret_cast<const char*>(v9), 4);
    f.close();
    CHECK_THROWS_AS(load_weights(path), FormatError);
  }
  SUBCASE("truncation") {
    std::ifstream in(path, std::ios::binary);
    std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_weights(path), FormatError);
  }
  std::remove(path.c_str());
}

TEST_CASE("mis-shaped tensors fail to bind") {
  GraphSpec g = testutil::toy_unet();
  WeightStore ws = init_weights(g, 7);

  // Permute one tensor's dims: same element count, wrong shape.
  WeightStore tampered;
  for (const auto& [name, entry] : ws) {
    if (name == "d1.w") {
      std::vector<std::uint32_t> dims = {entry.dims[1], entry.dims[0], entry.dims[2]};
      tampered.put(name, dims, entry.values);
    } else {
      tampered.put(name, entry.dims, entry.values);
    }
  }
  CHECK_THROWS_AS(validate_weights(g, tampered), ShapeError);
  CHECK_THROWS_AS(bind_graph<float>(g, tampered), ShapeError);

  // Weights for a narrower generator cannot bind to a wider one.
  GraphSpec g8 = build_generator(8);
  GraphSpec g4 = build_generator(4);
  CHECK_THROWS_AS(bind_graph<float>(g8, init_weights(g4, 1)), ShapeError);
}

TEST_CASE("graph validation rejects bad joins and stride layouts") {
  auto conv_layer = [](std::string name, ConvShape s) {
    LayerSpec l;
    l.kind = s.transposed ? LayerKind::transposed_conv : LayerKind::conv;
    l.name = std::move(name);
    l.conv = s;
    return l;
  };
  auto add_layer = [](int src) {
    LayerSpec l;
    l.kind = LayerKind::add;
    l.add_source = src;
    return l;
  };

  SUBCASE("channel mismatch at a join") {
    GraphSpec g;
    g.layers = {conv_layer("a", {.in_channels = 1, .out_channels = 2, .kernel_size = 3}),
                conv_layer("b", {.in_channels = 2, .out_channels = 3, .kernel_size = 3}),
                add_layer(0)};
    CHECK_THROWS_AS(validate_graph(g), ShapeError);
  }
  SUBCASE("resolution mismatch at a join") {
    GraphSpec g;
    g.layers = {conv_layer("a", {.in_channels = 1, .out_channels = 1, .kernel_size = 4, .stride = 2}),
                add_layer(-1)};
    CHECK_THROWS_AS(validate_graph(g), ShapeError);
  }
  SUBCASE("chained channel mismatch") {
    GraphSpec g;
    g.layers = {conv_layer("a", {.in_channels = 1, .out_channels = 2, .kernel_size = 3}),
                conv_layer("b", {.in_channels = 3, .out_channels = 1, .kernel_size = 3})};
    CHECK_THROWS_AS(validate_graph(g), ShapeError);
  }
  SUBCASE("asymmetric strides with up-sampling present") {
    GraphSpec g;
    g.layers = {conv_layer("a", {.in_channels = 1, .out_channels = 2, .kernel_size = 4, .stride = 2}),
                conv_layer("u", {.in_channels = 2, .out_channels = 1, .kernel_size = 8, .stride = 4,
                                 .transposed = true})};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
  }
  SUBCASE("down-sampling without channel doubling in a U-Net") {
    GraphSpec g;
    g.layers = {conv_layer("a", {.in_channels = 1, .out_channels = 4, .kernel_size = 4, .stride = 2}),
                conv_layer("u", {.in_channels = 4, .out_channels = 2, .kernel_size = 4, .stride = 2,
                                 .transposed = true})};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
  }
  SUBCASE("declared strides must match the layers") {
    GraphSpec g = testutil::toy_unet();
    g.strides = {2, 4};
    CHECK_THROWS_AS(validate_graph(g), ConfigError);
  }
  SUBCASE("toy graphs validate clean") {
    CHECK_NOTHROW(validate_graph(testutil::toy_unet()));
    CHECK_NOTHROW(validate_graph(testutil::toy_encoder()));
    CHECK_NOTHROW(validate_graph(testutil::toy_dilated()));
  }
}
