// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/stream.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "bwx/weights.hpp"

namespace bwx {

std::string LatencyReport::to_kv() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "chunk_samples=%d\n"
                "stride_product=%lld\n"
                "sample_rate_hz=%d\n"
                "architectural_latency_ms=%.6g\n"
                "per_chunk_compute_ms=%.6g\n"
                "real_time_factor=%.6g\n"
                "timing_scope=model_compute_only\n",
                chunk_samples, static_cast<long long>(stride_product), sample_rate_hz,
                architectural_latency_ms, per_chunk_compute_ms, real_time_factor);
  return buf;
}

Chunk process_chunk(const StreamExecutor& exec, StreamState& state, const Chunk& chunk) {
  Chunk out;
  out.index = chunk.index;
  out.samples.resize(chunk.samples.size() / exec.chunk_size() * exec.output_chunk_size());
  exec.process(state, chunk.samples, out.samples);
  return out;
}

LatencyReport probe_latency(const StreamExecutor& exec, int sample_rate_hz, int chunks,
                            int warmup, std::uint64_t seed) {
  LatencyReport r = exec.report_skeleton(sample_rate_hz);

  const int n = exec.chunk_size();
  const int total = warmup + chunks;
  CounterRng rng(seed, "latency_probe");
  std::vector<float> input(static_cast<std::size_t>(total) * n);
  for (std::size_t i = 0; i < input.size(); ++i) {
    input[i] = static_cast<float>(rng.symmetric(i));
  }

  StreamState state = exec.make_state();
  std::vector<float> out(exec.output_chunk_size());
  std::vector<double> times_ms;
  times_ms.reserve(chunks);
  for (int c = 0; c < total; ++c) {
    std::span<const float> in(input.data() + static_cast<std::size_t>(c) * n, n);
    const auto t0 = std::chrono::steady_clock::now();
    exec.process(state, in, out);
    const auto t1 = std::chrono::steady_clock::now();
    if (c >= warmup) {
      times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
  }
  auto mid = times_ms.begin() + times_ms.size() / 2;
  std::nth_element(times_ms.begin(), mid, times_ms.end());
  r.per_chunk_compute_ms = *mid;
  r.real_time_factor = r.per_chunk_compute_ms / r.architectural_latency_ms;
  return r;
}

}  // namespace bwx
