// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bwx/audio.hpp"
#include "bwx/weights.hpp"

namespace bwx {

struct BandSpec {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

// Named presets: wide 100-3800 Hz, medium 200-3600 Hz, narrow 300-3400 Hz.
BandSpec band_preset(const std::string& name);

// Per-draw uniform cutoffs: low in [0, 300] Hz, high in [3400, 4000] Hz.
class BandSampler {
 public:
  explicit BandSampler(std::uint64_t seed) : rng_(seed, "band_sampler") {}
  BandSpec sample();

 private:
  CounterRng rng_;
  std::uint64_t draws_ = 0;
};

// Linear-phase windowed-sinc band-pass (Hann window, 1025 taps), applied with
// group-delay compensation: the output is time-aligned with the input and has
// the same length. Offline data-preparation only; not part of the causal
// runtime path.
AudioBuffer bandpass(const AudioBuffer& x, const BandSpec& band);

// Causal strided average pooling (kernel 4, stride 2), applied once for 2x
// and twice for 4x. Output length is ceil(len/factor).
AudioBuffer avg_downsample(const AudioBuffer& x, int factor);

struct Spectrogram {
  std::int64_t frames = 0;
  int bins = 0;
  std::vector<float> mag;  // [frame][bin], row-major

  float at(std::int64_t frame, int bin) const { return mag[frame * bins + bin]; }
};

// Magnitude STFT, Hann window. frames = floor((len - window)/hop) + 1,
// bins = window/2 + 1. Input must be at least one window long.
Spectrogram stft_mag(const AudioBuffer& x, int window = 512, int hop = 128);

// CSV rows = frames, columns = bins, 6 significant digits.
void write_spectrogram_csv(const Spectrogram& s, const std::string& path);

}  // namespace bwx
