// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bwx/executor.hpp"

namespace bwx {

struct LatencyReport {
  int chunk_samples = 0;
  std::int64_t stride_product = 0;
  int sample_rate_hz = 16000;
  double architectural_latency_ms = 0.0;
  double per_chunk_compute_ms = 0.0;  // zero until probed
  double real_time_factor = 0.0;

  // Flat key=value block, one field per line.
  std::string to_kv() const;
};

// Per-layer rolling buffers: the last (kernel_size-1)*dilation input steps of
// each causal conv and the overlap-add carry (kernel_size - stride output
// steps) of each transposed conv. Total size is fixed at build time and never
// grows over the stream. One state belongs to one logical stream on one
// thread.
template <typename T>
class BasicStreamState {
 public:
  void reset() {
    for (auto& b : buffers_) std::fill(b.flat().begin(), b.flat().end(), T(0));
  }

  std::int64_t total_state_floats() const {
    std::int64_t n = 0;
    for (const auto& b : buffers_) n += static_cast<std::int64_t>(b.flat().size());
    return n;
  }

 private:
  template <typename U>
  friend class BasicStreamExecutor;
  std::vector<BasicFeatureMap<T>> buffers_;  // indexed by layer; empty where stateless
};

// Chunked execution of a causal graph. Immutable once built and shareable
// across threads; all mutable stream context lives in the state object.
// Freshly initialized state is all zeros, which matches the offline
// executor's left-zero-padding exactly, so concatenated chunk outputs
// reproduce the offline output from the first sample.
template <typename T>
class BasicStreamExecutor {
 public:
  BasicStreamExecutor(const GraphSpec& g, const WeightStore& ws, const std::string& prefix = "")
      : graph_(bind_graph<T>(g, ws, prefix)) {
    if (graph_.input_channels != 1) {
      throw UnsupportedGraphError("stream: graph input must be a single-channel waveform");
    }
    chunk_in_ = static_cast<int>(graph_.down_product);
    std::int64_t len = chunk_in_;
    int ch = graph_.input_channels;
    for (const BoundLayer<T>& l : graph_.layers) {
      switch (l.kind) {
        case LayerKind::conv:
          if (!l.conv.shape.causal) throw UnsupportedGraphError("stream: non-causal layer");
          if (len % l.conv.shape.stride != 0) {
            throw UnsupportedGraphError("stream: chunk not divisible by layer stride");
          }
          len /= l.conv.shape.stride;
          ch = l.conv.shape.out_channels;
          break;
        case LayerKind::transposed_conv:
          if (!l.conv.shape.causal) throw UnsupportedGraphError("stream: non-causal layer");
          len *= l.conv.shape.stride;
          ch = l.conv.shape.out_channels;
          break;
        case LayerKind::elu:
        case LayerKind::leaky_relu:
        case LayerKind::layer_norm:
        case LayerKind::add:
          break;
        default:
          throw UnsupportedGraphError("stream: unsupported op type");
      }
    }
    if (ch != 1) throw UnsupportedGraphError("stream: graph output must be a single-channel waveform");
    chunk_out_ = static_cast<int>(len);
  }

  int chunk_size() const { return chunk_in_; }
  int output_chunk_size() const { return chunk_out_; }
  std::int64_t stride_product() const { return graph_.down_product; }
  const BoundGraph<T>& graph() const { return graph_; }

  BasicStreamState<T> make_state() const {
    BasicStreamState<T> s;
    for (const BoundLayer<T>& l : graph_.layers) {
      if (l.kind == LayerKind::conv) {
        s.buffers_.emplace_back(l.conv.shape.in_channels, l.conv.shape.history());
      } else if (l.kind == LayerKind::transposed_conv) {
        s.buffers_.emplace_back(l.conv.shape.out_channels, l.conv.shape.carry());
      } else {
        s.buffers_.emplace_back();
      }
    }
    return s;
  }

  LatencyReport report_skeleton(int sample_rate_hz) const {
    LatencyReport r;
    r.chunk_samples = chunk_in_;
    r.stride_product = graph_.down_product;
    r.sample_rate_hz = sample_rate_hz;
    r.architectural_latency_ms = 1000.0 * chunk_in_ / sample_rate_hz;
    return r;
  }

  // Consumes a positive integer multiple of chunk_size() samples and emits
  // the proportional number of output samples into `out`.
  void process(BasicStreamState<T>& state, std::span<const T> in, std::span<T> out) const {
    if (in.empty() || in.size() % static_cast<std::size_t>(chunk_in_) != 0) {
      throw SizeError("stream: input length must be a positive multiple of the chunk size");
    }
    const std::int64_t m = static_cast<std::int64_t>(in.size()) / chunk_in_;
    if (std::ssize(out) != m * chunk_out_) throw SizeError("stream: output span has wrong length");
    if (state.buffers_.size() != graph_.layers.size()) {
      throw SizeError("stream: state does not belong to this executor");
    }

    BasicFeatureMap<T> input(1, std::ssize(in));
    std::copy(in.begin(), in.end(), input.row(0));

    std::map<int, BasicFeatureMap<T>> saved;
    BasicFeatureMap<T> cur = input;
    for (std::size_t idx = 0; idx < graph_.layers.size(); ++idx) {
      const BoundLayer<T>& l = graph_.layers[idx];
      switch (l.kind) {
        case LayerKind::conv:
          cur = step_conv(l.conv, cur, state.buffers_[idx]);
          break;
        case LayerKind::transposed_conv:
          cur = step_tconv(l.conv, cur, state.buffers_[idx]);
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
      if (graph_.is_source[idx]) saved.emplace(static_cast<int>(idx), cur);
    }
    std::copy(cur.row(0), cur.row(0) + cur.length(), out.begin());
  }

  std::vector<T> process(BasicStreamState<T>& state, std::span<const T> in) const {
    std::vector<T> out(in.size() / chunk_in_ * chunk_out_);
    process(state, in, out);
    return out;
  }

 private:
  // History-prefixed convolution: identical inner arithmetic to the offline
  // path; only where the past samples come from differs.
  static BasicFeatureMap<T> step_conv(const ConvParams<T>& p, const BasicFeatureMap<T>& cur,
                                      BasicFeatureMap<T>& hist) {
    const int H = p.shape.history();
    const std::int64_t len = cur.length();
    BasicFeatureMap<T> ext(p.shape.in_channels, H + len);
    for (int c = 0; c < p.shape.in_channels; ++c) {
      std::copy(hist.row(c), hist.row(c) + H, ext.row(c));
      std::copy(cur.row(c), cur.row(c) + len, ext.row(c) + H);
    }
    BasicFeatureMap<T> out(p.shape.out_channels, len / p.shape.stride);
    detail::conv_core(p, ext, H, out.length(), out);
    for (int c = 0; c < p.shape.in_channels; ++c) {
      const T* tail = ext.row(c) + len;  // last H columns of ext
      std::copy(tail, tail + H, hist.row(c));
    }
    return out;
  }

  // Overlap-add with carry: previous tail contributions seed the accumulator,
  // the final kernel_size - stride columns become the next carry.
  static BasicFeatureMap<T> step_tconv(const ConvParams<T>& p, const BasicFeatureMap<T>& cur,
                                       BasicFeatureMap<T>& carry) {
    const int tail = p.shape.carry();
    const std::int64_t n_out = cur.length() * p.shape.stride;
    BasicFeatureMap<T> acc(p.shape.out_channels, n_out + tail);
    for (int o = 0; o < p.shape.out_channels; ++o) {
      std::copy(carry.row(o), carry.row(o) + tail, acc.row(o));
    }
    detail::tconv_scatter(p, cur, acc);
    BasicFeatureMap<T> out(p.shape.out_channels, n_out);
    for (int o = 0; o < p.shape.out_channels; ++o) {
      const T* src = acc.row(o);
      T* dst = out.row(o);
      const T b = p.bias[o];
      for (std::int64_t t = 0; t < n_out; ++t) dst[t] = src[t] + b;
      std::copy(src + n_out, src + n_out + tail, carry.row(o));
    }
    return out;
  }

  BoundGraph<T> graph_;
  int chunk_in_ = 1;
  int chunk_out_ = 1;
};

using StreamExecutor = BasicStreamExecutor<float>;
using StreamState = BasicStreamState<float>;

inline StreamExecutor build_stream(const GraphSpec& g, const WeightStore& ws) {
  return StreamExecutor(g, ws);
}

Chunk process_chunk(const StreamExecutor& exec, StreamState& state, const Chunk& chunk);

// Wall-clock profile: median per-chunk compute over `chunks` random chunks
// after `warmup` unmeasured ones, single-threaded. Timing covers model
// compute only (no band-pass preprocessing or file I/O).
LatencyReport probe_latency(const StreamExecutor& exec, int sample_rate_hz = 16000,
                            int chunks = 1000, int warmup = 50, std::uint64_t seed = 0);

}  // namespace bwx
