// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bwx/audio.hpp"
#include "bwx/errors.hpp"

namespace bwx {

// Static description of a 1-D convolution layer. Weights live in a
// WeightStore and are bound separately.
struct ConvShape {
  int in_channels = 0;
  int out_channels = 0;
  int kernel_size = 0;
  int stride = 1;
  int dilation = 1;
  int groups = 1;
  bool transposed = false;
  bool causal = true;

  // Input history a streaming step must retain, in input samples.
  int history() const { return transposed ? 0 : (kernel_size - 1) * dilation; }
  // Output-side overlap-add carry of a transposed layer.
  int carry() const { return transposed ? kernel_size - stride : 0; }

  std::int64_t weight_count() const {
    return std::int64_t(out_channels) * (in_channels / groups) * kernel_size;
  }
};

inline void validate_conv(const ConvShape& s) {
  if (s.in_channels <= 0 || s.out_channels <= 0) throw ConfigError("conv: channels must be positive");
  if (s.kernel_size <= 0) throw ConfigError("conv: kernel_size must be positive");
  if (s.stride < 1 || s.dilation < 1 || s.groups < 1) throw ConfigError("conv: stride/dilation/groups must be >= 1");
  if (s.in_channels % s.groups != 0 || s.out_channels % s.groups != 0) {
    throw ConfigError("conv: channels must be divisible by groups");
  }
  if (s.transposed) {
    if (s.dilation != 1 || s.groups != 1) throw ConfigError("transposed conv: dilation and groups must be 1");
    if (s.kernel_size != 2 * s.stride) throw ConfigError("transposed conv: kernel_size must equal 2*stride");
  }
}

// Shape plus bound weights. weights is [out][in/groups][kernel] flattened,
// where tap k multiplies the input k*dilation steps in the past (k = 0 is
// "now"). bias is [out].
template <typename T>
struct ConvParams {
  ConvShape shape;
  std::vector<T> weights;
  std::vector<T> bias;

  T weight(int o, int i_local, int k) const {
    const auto per_out = std::size_t(shape.in_channels / shape.groups) * shape.kernel_size;
    return weights[o * per_out + std::size_t(i_local) * shape.kernel_size + k];
  }
};

namespace detail {

// Shared inner kernel for offline and streaming execution:
//   out[o][j] = sum_{i,k} w[o][i][k] * ext[i][base + j*stride - k*dilation], then + bias[o].
// The caller guarantees every index lands inside ext. The accumulation order
// (i ascending, k ascending, bias last) is identical in both execution modes,
// which is what makes streaming reproduce offline output bit-for-bit.
template <typename T>
void conv_core(const ConvParams<T>& p, const BasicFeatureMap<T>& ext, std::int64_t base,
               std::int64_t n_out, BasicFeatureMap<T>& out) {
  const ConvShape& s = p.shape;
  const int in_per_group = s.in_channels / s.groups;
  const int out_per_group = s.out_channels / s.groups;
  for (int o = 0; o < s.out_channels; ++o) {
    T* dst = out.row(o);
    std::fill(dst, dst + n_out, T(0));
    const int g = o / out_per_group;
    for (int il = 0; il < in_per_group; ++il) {
      const T* src = ext.row(g * in_per_group + il);
      for (int k = 0; k < s.kernel_size; ++k) {
        const T w = p.weight(o, il, k);
        const std::int64_t off = base - std::int64_t(k) * s.dilation;
        for (std::int64_t j = 0; j < n_out; ++j) {
          dst[j] += w * src[off + j * s.stride];
        }
      }
    }
    const T b = p.bias[o];
    for (std::int64_t j = 0; j < n_out; ++j) dst[j] += b;
  }
}

// Overlap-add scatter for transposed convolution. acc has out_channels rows
// and x.length()*stride + carry columns; on entry its head holds the carry
// from the previous step (zeros for a fresh stream / offline run). Inputs are
// scattered in ascending time order so each output sample accumulates its
// contributions oldest-first, matching offline evaluation exactly. Bias is
// the caller's job (added once at emission).
template <typename T>
void tconv_scatter(const ConvParams<T>& p, const BasicFeatureMap<T>& x, BasicFeatureMap<T>& acc) {
  const ConvShape& s = p.shape;
  for (std::int64_t j = 0; j < x.length(); ++j) {
    for (int o = 0; o < s.out_channels; ++o) {
      T* dst = acc.row(o) + j * s.stride;
      for (int i = 0; i < s.in_channels; ++i) {
        const T v = x.at(i, j);
        const T* w = &p.weights[(std::size_t(o) * s.in_channels + i) * s.kernel_size];
        for (int u = 0; u < s.kernel_size; ++u) dst[u] += w[u] * v;
      }
    }
  }
}

// Input with p.history() zeros prepended, ready for conv_core with
// base = history.
template <typename T>
BasicFeatureMap<T> left_pad(const BasicFeatureMap<T>& x, int pad) {
  BasicFeatureMap<T> ext(x.channels(), x.length() + pad);
  for (int c = 0; c < x.channels(); ++c) {
    std::copy(x.row(c), x.row(c) + x.length(), ext.row(c) + pad);
  }
  return ext;
}

}  // namespace detail

// Causal convolution over a whole sequence. Output length is
// ceil(length/stride); output j looks at inputs up to j*stride only.
template <typename T>
BasicFeatureMap<T> causal_conv(const BasicFeatureMap<T>& x, const ConvParams<T>& p) {
  validate_conv(p.shape);
  if (p.shape.transposed) throw ConfigError("causal_conv: params are transposed");
  if (x.channels() != p.shape.in_channels) throw ShapeError("causal_conv: channel mismatch");
  const int pad = p.shape.history();
  const std::int64_t n_out = (x.length() + p.shape.stride - 1) / p.shape.stride;
  BasicFeatureMap<T> ext = detail::left_pad(x, pad);
  BasicFeatureMap<T> out(p.shape.out_channels, n_out);
  detail::conv_core(p, ext, pad, n_out, out);
  return out;
}

// Causal transposed convolution (upsampling by stride). Output length is
// length*stride; contributions past the end are dropped, exactly as a
// streaming run leaves them in its carry buffer.
template <typename T>
BasicFeatureMap<T> causal_transposed_conv(const BasicFeatureMap<T>& x, const ConvParams<T>& p) {
  validate_conv(p.shape);
  if (!p.shape.transposed) throw ConfigError("causal_transposed_conv: params are not transposed");
  if (x.channels() != p.shape.in_channels) throw ShapeError("causal_transposed_conv: channel mismatch");
  const std::int64_t n_out = x.length() * p.shape.stride;
  BasicFeatureMap<T> acc(p.shape.out_channels, n_out + p.shape.carry());
  detail::tconv_scatter(p, x, acc);
  BasicFeatureMap<T> out(p.shape.out_channels, n_out);
  for (int o = 0; o < p.shape.out_channels; ++o) {
    const T* src = acc.row(o);
    T* dst = out.row(o);
    const T b = p.bias[o];
    for (std::int64_t t = 0; t < n_out; ++t) dst[t] = src[t] + b;
  }
  return out;
}

template <typename T>
BasicFeatureMap<T> elu(BasicFeatureMap<T> x) {
  for (T& v : x.flat()) {
    if (v < T(0)) v = std::expm1(v);
  }
  return x;
}

template <typename T>
BasicFeatureMap<T> leaky_relu(BasicFeatureMap<T> x, T alpha = T(0.2)) {
  for (T& v : x.flat()) {
    if (v < T(0)) v = alpha * v;
  }
  return x;
}

// Per-time-step normalization across channels to zero mean and unit variance
// (epsilon 1e-5), then a per-channel affine.
template <typename T>
BasicFeatureMap<T> layer_norm(const BasicFeatureMap<T>& x, std::span<const T> gain,
                              std::span<const T> bias) {
  const int C = x.channels();
  if (std::ssize(gain) != C || std::ssize(bias) != C) throw ShapeError("layer_norm: gain/bias length mismatch");
  BasicFeatureMap<T> out(C, x.length());
  for (std::int64_t t = 0; t < x.length(); ++t) {
    T mean = T(0);
    for (int c = 0; c < C; ++c) mean += x.at(c, t);
    mean /= T(C);
    T var = T(0);
    for (int c = 0; c < C; ++c) {
      const T d = x.at(c, t) - mean;
      var += d * d;
    }
    var /= T(C);
    const T inv = T(1) / std::sqrt(var + T(1e-5));
    for (int c = 0; c < C; ++c) {
      out.at(c, t) = (x.at(c, t) - mean) * inv * gain[c] + bias[c];
    }
  }
  return out;
}

}  // namespace bwx
