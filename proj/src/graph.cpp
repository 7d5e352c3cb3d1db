// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/graph.hpp"

#include <algorithm>
#include <numeric>

namespace bwx {

namespace {

constexpr int kResidualDilations[3] = {1, 3, 9};

struct GraphBuilder {
  GraphSpec g;

  int last() const { return static_cast<int>(g.layers.size()) - 1; }

  int conv(std::string name, ConvShape shape, bool boundary = false) {
    LayerSpec l;
    l.kind = shape.transposed ? LayerKind::transposed_conv : LayerKind::conv;
    l.name = std::move(name);
    l.conv = shape;
    l.boundary = boundary;
    g.layers.push_back(std::move(l));
    return last();
  }

  int elu() {
    LayerSpec l;
    l.kind = LayerKind::elu;
    g.layers.push_back(std::move(l));
    return last();
  }

  int leaky_relu(bool feature_tap) {
    LayerSpec l;
    l.kind = LayerKind::leaky_relu;
    l.alpha = 0.2f;
    l.feature_tap = feature_tap;
    g.layers.push_back(std::move(l));
    return last();
  }

  int layer_norm(std::string name, int channels) {
    LayerSpec l;
    l.kind = LayerKind::layer_norm;
    l.name = std::move(name);
    l.norm_channels = channels;
    g.layers.push_back(std::move(l));
    return last();
  }

  int add(int source) {
    LayerSpec l;
    l.kind = LayerKind::add;
    l.add_source = source;
    g.layers.push_back(std::move(l));
    return last();
  }

  // Pre-activation residual unit: x + conv1x1(elu(conv_k3_dilated(elu(x)))).
  void residual_unit(const std::string& name, int channels, int dilation) {
    const int entry = last();
    const int mid = std::max(1, channels / 2);
    elu();
    conv(name + ".c1", {.in_channels = channels,
                        .out_channels = mid,
                        .kernel_size = 3,
                        .dilation = dilation});
    elu();
    conv(name + ".c2", {.in_channels = mid, .out_channels = channels, .kernel_size = 1});
    add(entry);
  }
};

}  // namespace

GraphSpec build_generator(int base_channels) {
  if (base_channels < 1) throw ConfigError("generator: base_channels must be >= 1");
  const std::vector<int> strides = {2, 2, 8, 8};

  GraphBuilder b;
  b.g.input_channels = 1;
  b.g.base_channels = base_channels;
  b.g.strides = strides;

  b.conv("in_conv",
         {.in_channels = 1, .out_channels = base_channels, .kernel_size = 7},
         /*boundary=*/true);

  // Encoder: per block, three residual units then a strided down-sampling
  // conv that doubles the channel count. Skip sources are the un-activated
  // outputs just before each down-sampling conv.
  std::vector<int> skips;
  int ch = base_channels;
  for (std::size_t i = 0; i < strides.size(); ++i) {
    const std::string block = "enc.b" + std::to_string(i);
    for (int r = 0; r < 3; ++r) {
      b.residual_unit(block + ".ru" + std::to_string(r), ch, kResidualDilations[r]);
    }
    skips.push_back(b.last());
    b.elu();
    const int s = strides[i];
    b.conv(block + ".down", {.in_channels = ch,
                             .out_channels = 2 * ch,
                             .kernel_size = 2 * s,
                             .stride = s});
    ch *= 2;
  }

  // Decoder: mirrored blocks, each a transposed up-sampling conv that halves
  // the channel count, the matching encoder skip add, then three residual
  // units.
  for (std::size_t j = 0; j < strides.size(); ++j) {
    const std::string block = "dec.b" + std::to_string(j);
    const int s = strides[strides.size() - 1 - j];
    b.elu();
    b.conv(block + ".up", {.in_channels = ch,
                           .out_channels = ch / 2,
                           .kernel_size = 2 * s,
                           .stride = s,
                           .transposed = true});
    ch /= 2;
    b.add(skips[strides.size() - 1 - j]);
    for (int r = 0; r < 3; ++r) {
      b.residual_unit(block + ".ru" + std::to_string(r), ch, kResidualDilations[r]);
    }
  }

  b.elu();
  b.conv("out_conv", {.in_channels = ch, .out_channels = 1, .kernel_size = 7},
         /*boundary=*/true);
  b.add(-1);  // waveform skip: input added straight onto the output

  validate_graph(b.g);
  return b.g;
}

GraphSpec build_discriminator() {
  constexpr int kInitialWidth = 16;
  constexpr int kMaxWidth = 1024;
  constexpr int kGroupSize = 4;
  constexpr int kStride = 4;
  constexpr int kMultiplier = 4;

  GraphBuilder b;
  b.g.input_channels = 1;
  b.g.base_channels = kInitialWidth;
  b.g.strides = {kStride, kStride, kStride, kStride};

  b.conv("conv0", {.in_channels = 1, .out_channels = kInitialWidth, .kernel_size = 7});
  b.layer_norm("ln0", kInitialWidth);
  b.leaky_relu(/*feature_tap=*/true);

  int ch = kInitialWidth;
  for (int i = 1; i <= 4; ++i) {
    const int out = std::min(ch * kMultiplier, kMaxWidth);
    b.conv("conv" + std::to_string(i), {.in_channels = ch,
                                        .out_channels = out,
                                        .kernel_size = 2 * kStride,
                                        .stride = kStride,
                                        .groups = ch / kGroupSize});
    b.layer_norm("ln" + std::to_string(i), out);
    b.leaky_relu(/*feature_tap=*/true);
    ch = out;
  }

  b.conv("conv5", {.in_channels = ch, .out_channels = ch, .kernel_size = 3});
  b.layer_norm("ln5", ch);
  b.leaky_relu(/*feature_tap=*/true);
  b.conv("conv6", {.in_channels = ch, .out_channels = 1, .kernel_size = 3});

  validate_graph(b.g);
  return b.g;
}

namespace {

// Temporal resolution relative to the input, as a reduced fraction
// (output steps per `den` input steps is `num`).
struct Resolution {
  std::int64_t num = 1;
  std::int64_t den = 1;

  void reduce() {
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
  }
  bool operator==(const Resolution&) const = default;
};

}  // namespace

void validate_graph(const GraphSpec& g) {
  if (g.input_channels < 1) throw ConfigError("graph: input_channels must be >= 1");
  if (g.layers.empty()) throw ConfigError("graph: no layers");

  std::vector<int> down_strides, up_strides;
  std::vector<std::pair<int, Resolution>> states;  // per layer: (channels, resolution)
  int ch = g.input_channels;
  Resolution res;

  for (std::size_t idx = 0; idx < g.layers.size(); ++idx) {
    const LayerSpec& l = g.layers[idx];
    switch (l.kind) {
      case LayerKind::conv: {
        validate_conv(l.conv);
        if (l.conv.transposed) throw ConfigError("graph: conv layer marked transposed");
        if (l.conv.in_channels != ch) {
          throw ShapeError("graph: layer '" + l.name + "' expects " +
                           std::to_string(l.conv.in_channels) + " channels, has " +
                           std::to_string(ch));
        }
        ch = l.conv.out_channels;
        if (l.conv.stride > 1) {
          down_strides.push_back(l.conv.stride);
          res.den *= l.conv.stride;
          res.reduce();
        }
        break;
      }
      case LayerKind::transposed_conv: {
        validate_conv(l.conv);
        if (!l.conv.transposed) throw ConfigError("graph: transposed layer not marked transposed");
        if (l.conv.in_channels != ch) {
          throw ShapeError("graph: layer '" + l.name + "' channel mismatch");
        }
        ch = l.conv.out_channels;
        if (l.conv.stride > 1) {
          up_strides.push_back(l.conv.stride);
          res.num *= l.conv.stride;
          res.reduce();
        }
        break;
      }
      case LayerKind::layer_norm:
        if (l.norm_channels != ch) {
          throw ShapeError("graph: layer_norm '" + l.name + "' width mismatch");
        }
        break;
      case LayerKind::elu:
      case LayerKind::leaky_relu:
        break;
      case LayerKind::add: {
        const int src = l.add_source;
        if (src < -1 || src >= static_cast<int>(idx)) {
          throw ConfigError("graph: add source out of range");
        }
        const int src_ch = src == -1 ? g.input_channels : states[src].first;
        const Resolution src_res = src == -1 ? Resolution{} : states[src].second;
        if (src_ch != ch) throw ShapeError("graph: add join channel mismatch");
        if (!(src_res == res)) throw ShapeError("graph: add join resolution mismatch");
        break;
      }
    }
    states.emplace_back(ch, res);
  }

  if (!g.strides.empty() && !down_strides.empty() &&
      !std::equal(g.strides.begin(), g.strides.end(), down_strides.begin(), down_strides.end())) {
    throw ConfigError("graph: declared strides disagree with layer strides");
  }

  // U-Net family checks apply only to graphs that up-sample.
  if (!up_strides.empty()) {
    std::vector<int> rev(down_strides.rbegin(), down_strides.rend());
    if (rev != up_strides) {
      throw ConfigError("graph: up-sampling strides must mirror down-sampling strides");
    }
    for (const LayerSpec& l : g.layers) {
      if (l.kind == LayerKind::conv && l.conv.stride > 1 &&
          l.conv.out_channels != 2 * l.conv.in_channels) {
        throw ConfigError("graph: down-sampling conv must double channels");
      }
      if (l.kind == LayerKind::transposed_conv && l.conv.stride > 1 &&
          2 * l.conv.out_channels != l.conv.in_channels) {
        throw ConfigError("graph: up-sampling conv must halve channels");
      }
    }
  }
}

std::int64_t down_stride_product(const GraphSpec& g) {
  std::int64_t p = 1;
  for (const LayerSpec& l : g.layers) {
    if (l.kind == LayerKind::conv) p *= l.conv.stride;
  }
  return p;
}

std::int64_t up_stride_product(const GraphSpec& g) {
  std::int64_t p = 1;
  for (const LayerSpec& l : g.layers) {
    if (l.kind == LayerKind::transposed_conv) p *= l.conv.stride;
  }
  return p;
}

ParamCounts count_params(const GraphSpec& g) {
  ParamCounts c;
  for (const LayerSpec& l : g.layers) {
    switch (l.kind) {
      case LayerKind::conv:
      case LayerKind::transposed_conv:
        if (l.boundary) {
          c.boundary_weights += l.conv.weight_count();
          c.boundary_biases += l.conv.out_channels;
        } else {
          c.internal_weights += l.conv.weight_count();
          c.internal_biases += l.conv.out_channels;
        }
        break;
      case LayerKind::layer_norm:
        c.norm_params += 2 * static_cast<std::int64_t>(l.norm_channels);
        break;
      default:
        break;
    }
  }
  return c;
}

}  // namespace bwx
