// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bwx/ops.hpp"

namespace bwx {

enum class LayerKind {
  conv,
  transposed_conv,
  elu,
  leaky_relu,
  layer_norm,
  add,  // element-wise add of an earlier layer's output (or the graph input)
};

// One node of a sequential graph. Activations and adds are layers of their
// own; `add` layers reference earlier outputs by index (-1 = graph input).
struct LayerSpec {
  LayerKind kind = LayerKind::conv;
  std::string name;       // weight-store key for conv / layer_norm layers
  ConvShape conv;         // conv kinds only
  float alpha = 0.2f;     // leaky_relu slope
  int norm_channels = 0;  // layer_norm width
  int add_source = -2;    // add kind only
  bool boundary = false;  // boundary conv, counted separately from internal layers
  bool feature_tap = false;  // activation output collected as a discriminator feature
};

struct GraphSpec {
  std::vector<LayerSpec> layers;
  int input_channels = 1;
  int base_channels = 0;
  std::vector<int> strides;  // encoder down-sampling factors, in order
};

// Symmetric encoder-decoder U-Net over the waveform: input conv, four encoder
// blocks (three dilated residual units + strided conv each, strides 2,2,8,8),
// mirrored decoder with transposed convs, per-block skip adds, ELU
// activations, no normalization, and a direct input-to-output waveform skip.
GraphSpec build_generator(int base_channels = 8);

// Single-scale waveform discriminator: plain conv, four grouped strided convs
// (group size 4, stride 4, channel multiplier 4 capped at 1024), then two
// plain convs down to 1-channel logits. Layer norm + leaky ReLU after every
// conv except the last. All convolutions causal.
GraphSpec build_discriminator();

// Throws ConfigError/ShapeError on inconsistent layer chains, bad add
// sources, or (for graphs with up-sampling) asymmetric stride lists or
// channel widths that do not double/halve across resolution changes.
void validate_graph(const GraphSpec& g);

std::int64_t down_stride_product(const GraphSpec& g);
std::int64_t up_stride_product(const GraphSpec& g);

struct ParamCounts {
  std::int64_t internal_weights = 0;
  std::int64_t internal_biases = 0;
  std::int64_t boundary_weights = 0;
  std::int64_t boundary_biases = 0;
  std::int64_t norm_params = 0;

  std::int64_t total() const {
    return internal_weights + internal_biases + boundary_weights + boundary_biases + norm_params;
  }
};

// Exact parameter census from shapes alone. Kernel weights and biases are
// tallied separately: widths scale linearly with base_channels, so kernel
// weights of internal layers scale quadratically while biases scale linearly.
ParamCounts count_params(const GraphSpec& g);

}  // namespace bwx
