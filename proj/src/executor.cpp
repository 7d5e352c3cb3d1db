// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/executor.hpp"

#include "bwx/dsp.hpp"

namespace bwx {

DiscriminatorOutput run_discriminator(const GraphSpec& d, const WeightStore& ws,
                                      const AudioBuffer& audio) {
  DiscriminatorOutput out;
  for (int k = 0; k < 3; ++k) {
    const AudioBuffer scaled = k == 0 ? audio : avg_downsample(audio, k == 1 ? 2 : 4);
    BoundGraph<float> bg = bind_graph<float>(d, ws, scale_prefix(k));
    std::vector<FeatureMap> feats;
    FeatureMap logits = run_offline(bg, to_feature_map(scaled), &feats);
    if (logits.channels() != 1) throw ShapeError("discriminator: logits must be single-channel");
    ensure_finite(logits.flat(), "discriminator logits");
    for (const FeatureMap& f : feats) ensure_finite(f.flat(), "discriminator features");
    out.logits.emplace_back(logits.row(0), logits.row(0) + logits.length());
    out.features.push_back(std::move(feats));
  }
  return out;
}

AudioBuffer run_generator(const GraphSpec& g, const WeightStore& ws, const AudioBuffer& input) {
  const std::int64_t chunk = down_stride_product(g);
  if (chunk > 0 && input.size() % chunk != 0) {
    throw SizeError("run_generator: input length must be a multiple of " + std::to_string(chunk));
  }
  BoundGraph<float> bg = bind_graph<float>(g, ws, "");
  FeatureMap out = run_offline(bg, to_feature_map(input));
  ensure_finite(out.flat(), "generator output");
  return to_audio(out, input.sample_rate_hz);
}

}  // namespace bwx
