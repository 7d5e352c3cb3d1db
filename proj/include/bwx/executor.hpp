// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <map>
#include <string>
#include <vector>

#include "bwx/audio.hpp"
#include "bwx/graph.hpp"
#include "bwx/weights.hpp"

namespace bwx {

template <typename T>
struct BoundLayer {
  LayerKind kind = LayerKind::conv;
  ConvParams<T> conv;
  std::vector<T> gain, norm_bias;
  T alpha = T(0.2);
  int add_source = -2;
  bool feature_tap = false;
};

template <typename T>
struct BoundGraph {
  std::vector<BoundLayer<T>> layers;
  int input_channels = 1;
  std::vector<char> is_source;  // marks layers whose outputs feed later adds
  bool input_is_source = false;
  std::int64_t down_product = 1;
  std::int64_t up_product = 1;
};

// Resolves every layer's tensors from the store (throws ShapeError if a
// tensor is missing or mis-shaped) and converts values to T.
template <typename T>
BoundGraph<T> bind_graph(const GraphSpec& g, const WeightStore& ws, const std::string& prefix = "") {
  validate_graph(g);
  validate_weights(g, ws, prefix);
  BoundGraph<T> bg;
  bg.input_channels = g.input_channels;
  bg.is_source.assign(g.layers.size(), 0);
  auto to_t = [](const std::vector<float>& v) { return std::vector<T>(v.begin(), v.end()); };
  for (const LayerSpec& l : g.layers) {
    BoundLayer<T> b;
    b.kind = l.kind;
    b.alpha = static_cast<T>(l.alpha);
    b.add_source = l.add_source;
    b.feature_tap = l.feature_tap;
    switch (l.kind) {
      case LayerKind::conv:
      case LayerKind::transposed_conv:
        b.conv.shape = l.conv;
        b.conv.weights = to_t(ws.get(prefix + l.name + ".w").values);
        b.conv.bias = to_t(ws.get(prefix + l.name + ".b").values);
        break;
      case LayerKind::layer_norm:
        b.gain = to_t(ws.get(prefix + l.name + ".g").values);
        b.norm_bias = to_t(ws.get(prefix + l.name + ".b").values);
        break;
      default:
        break;
    }
    if (l.kind == LayerKind::add) {
      if (l.add_source == -1) {
        bg.input_is_source = true;
      } else {
        bg.is_source[l.add_source] = 1;
      }
    }
    if (l.kind == LayerKind::conv) bg.down_product *= l.conv.stride;
    if (l.kind == LayerKind::transposed_conv) bg.up_product *= l.conv.stride;
    bg.layers.push_back(std::move(b));
  }
  return bg;
}

namespace detail {

template <typename T>
void add_in_place(BasicFeatureMap<T>& dst, const BasicFeatureMap<T>& src) {
  if (dst.channels() != src.channels() || dst.length() != src.length()) {
    throw ShapeError("add join: operand shapes differ");
  }
  T* d = dst.flat().data();
  const T* s = src.flat().data();
  for (std::size_t i = 0; i < dst.flat().size(); ++i) d[i] += s[i];
}

}  // namespace detail

// Whole-sequence causal execution. When `features` is non-null, outputs of
// feature-tapped activation layers are appended to it in graph order.
template <typename T>
BasicFeatureMap<T> run_offline(const BoundGraph<T>& g, const BasicFeatureMap<T>& input,
                               std::vector<BasicFeatureMap<T>>* features = nullptr) {
  if (input.channels() != g.input_channels) throw ShapeError("run_offline: input channel mismatch");
  std::map<int, BasicFeatureMap<T>> saved;
  BasicFeatureMap<T> cur = input;
  for (std::size_t idx = 0; idx < g.layers.size(); ++idx) {
    const BoundLayer<T>& l = g.layers[idx];
    switch (l.kind) {
      case LayerKind::conv:
        cur = causal_conv(cur, l.conv);
        break;
      case LayerKind::transposed_conv:
        cur = causal_transposed_conv(cur, l.conv);
        break;
      case LayerKind::elu:
        cur = elu(std::move(cur));
        break;
      case LayerKind::leaky_relu:
        cur = leaky_relu(std::move(cur), l.alpha);
        break;
      case LayerKind::layer_norm:
        cur = layer_norm<T>(cur, l.gain, l.norm_bias);
        break;
      case LayerKind::add:
        detail::add_in_place(cur, l.add_source == -1 ? input : saved.at(l.add_source));
        break;
    }
    if (l.feature_tap && features) features->push_back(cur);
    if (g.is_source[idx]) saved.emplace(static_cast<int>(idx), cur);
  }
  return cur;
}

// Per-scale logits and internal-layer activations of the multi-resolution
// discriminator: scale 0 sees the waveform as-is, scales 1 and 2 see it
// 2x and 4x down-sampled.
struct DiscriminatorOutput {
  std::vector<std::vector<float>> logits;         // [K][T_k]
  std::vector<std::vector<FeatureMap>> features;  // [K][L]
};

DiscriminatorOutput run_discriminator(const GraphSpec& d, const WeightStore& ws,
                                      const AudioBuffer& audio);

// Convenience: bind, run, and re-wrap the enhanced waveform. Input length
// must be a multiple of the graph's stride product.
AudioBuffer run_generator(const GraphSpec& g, const WeightStore& ws, const AudioBuffer& input);

}  // namespace bwx
