// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/dsp.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace bwx {

namespace {

constexpr int kBandpassTaps = 1025;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Ideal low-pass impulse response at normalized cutoff f (cycles/sample),
// centered on tap m.
double lowpass_tap(double f, int n, int m) { return 2.0 * f * sinc(2.0 * f * (n - m)); }

}  // namespace

BandSpec band_preset(const std::string& name) {
  if (name == "wide") return {100.0, 3800.0};
  if (name == "medium") return {200.0, 3600.0};
  if (name == "narrow") return {300.0, 3400.0};
  throw DomainError("unknown band preset: " + name);
}

BandSpec BandSampler::sample() {
  const double low = 300.0 * rng_.uniform01(draws_++);
  const double high = 3400.0 + 600.0 * rng_.uniform01(draws_++);
  return {low, high};
}

AudioBuffer bandpass(const AudioBuffer& x, const BandSpec& band) {
  const double nyquist = x.sample_rate_hz / 2.0;
  if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz && band.high_hz <= nyquist)) {
    throw DomainError("bandpass: band must satisfy 0 <= low < high <= nyquist");
  }

  const int m = (kBandpassTaps - 1) / 2;
  const double fl = band.low_hz / x.sample_rate_hz;
  const double fh = band.high_hz / x.sample_rate_hz;
  std::vector<double> h(kBandpassTaps);
  for (int n = 0; n < kBandpassTaps; ++n) {
    const double hann =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / (kBandpassTaps - 1)));
    h[n] = (lowpass_tap(fh, n, m) - lowpass_tap(fl, n, m)) * hann;
  }

  // Group-delay compensated application: y[t] = sum_n h[n] * x[t + m - n].
  const std::int64_t len = x.size();
  std::vector<float> y(len);
  for (std::int64_t t = 0; t < len; ++t) {
    double acc = 0.0;
    const std::int64_t lo = std::max<std::int64_t>(0, t + m - (len - 1));
    const std::int64_t hi = std::min<std::int64_t>(kBandpassTaps - 1, t + m);
    for (std::int64_t n = lo; n <= hi; ++n) {
      acc += h[n] * x.samples[t + m - n];
    }
    y[t] = static_cast<float>(acc);
  }
  AudioBuffer out(std::move(y), x.sample_rate_hz);
  ensure_finite(out.samples, "bandpass");
  return out;
}

namespace {

AudioBuffer avg_pool_once(const AudioBuffer& x) {
  constexpr int kKernel = 4;
  constexpr int kStride = 2;
  const std::int64_t n_out = (x.size() + kStride - 1) / kStride;
  std::vector<float> y(n_out);
  for (std::int64_t t = 0; t < n_out; ++t) {
    float acc = 0.0f;
    for (int k = kKernel - 1; k >= 0; --k) {  // oldest tap first
      const std::int64_t idx = t * kStride - k;
      if (idx >= 0) acc += x.samples[idx];
    }
    y[t] = acc / kKernel;
  }
  return AudioBuffer(std::move(y), x.sample_rate_hz);
}

}  // namespace

AudioBuffer avg_downsample(const AudioBuffer& x, int factor) {
  if (factor != 2 && factor != 4) throw DomainError("avg_downsample: factor must be 2 or 4");
  AudioBuffer out = factor == 2 ? avg_pool_once(x) : avg_pool_once(avg_pool_once(x));
  ensure_finite(out.samples, "avg_downsample");
  return out;
}

Spectrogram stft_mag(const AudioBuffer& x, int window, int hop) {
  if (window < 2 || hop < 1) throw DomainError("stft: window/hop out of range");
  if (x.size() < window) throw DomainError("stft: input shorter than one window");

  const std::int64_t frames = (x.size() - window) / hop + 1;
  const int bins = window / 2 + 1;

  std::vector<double> win(window);
  for (int n = 0; n < window; ++n) {
    win[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / window));
  }
  // Twiddle tables for a direct DFT over the one-sided bins.
  std::vector<double> cos_t(static_cast<std::size_t>(bins) * window);
  std::vector<double> sin_t(static_cast<std::size_t>(bins) * window);
  for (int k = 0; k < bins; ++k) {
    for (int n = 0; n < window; ++n) {
      const double ang = 2.0 * std::numbers::pi * k * n / window;
      cos_t[std::size_t(k) * window + n] = std::cos(ang);
      sin_t[std::size_t(k) * window + n] = std::sin(ang);
    }
  }

  Spectrogram s;
  s.frames = frames;
  s.bins = bins;
  s.mag.resize(static_cast<std::size_t>(frames) * bins);
  std::vector<double> frame(window);
  for (std::int64_t f = 0; f < frames; ++f) {
    const float* src = x.samples.data() + f * hop;
    for (int n = 0; n < window; ++n) frame[n] = win[n] * src[n];
    for (int k = 0; k < bins; ++k) {
      const double* ct = &cos_t[std::size_t(k) * window];
      const double* st = &sin_t[std::size_t(k) * window];
      double re = 0.0, im = 0.0;
      for (int n = 0; n < window; ++n) {
        re += frame[n] * ct[n];
        im -= frame[n] * st[n];
      }
      s.mag[f * bins + k] = static_cast<float>(std::hypot(re, im));
    }
  }
  return s;
}

void write_spectrogram_csv(const Spectrogram& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("spectrogram: cannot open " + path + " for writing");
  char buf[32];
  for (std::int64_t f = 0; f < s.frames; ++f) {
    for (int b = 0; b < s.bins; ++b) {
      std::snprintf(buf, sizeof(buf), "%.6g", s.at(f, b));
      if (b) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("spectrogram: write failed for " + path);
}

}  // namespace bwx
