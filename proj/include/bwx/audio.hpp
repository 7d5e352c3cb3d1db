// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bwx/errors.hpp"

namespace bwx {

// Mono waveform plus its sample rate. Samples are dimensionless amplitudes,
// nominally in [-1, 1]. Treated as immutable once constructed.
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = 16000;

  AudioBuffer() = default;
  AudioBuffer(std::vector<float> s, int rate) : samples(std::move(s)), sample_rate_hz(rate) {
    if (sample_rate_hz <= 0) throw DomainError("sample rate must be positive");
  }

  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
  double duration_s() const { return static_cast<double>(size()) / sample_rate_hz; }
};

// 2-D activation tensor indexed [channel][time], row-major.
template <typename T>
class BasicFeatureMap {
 public:
  BasicFeatureMap() = default;
  BasicFeatureMap(int channels, std::int64_t length)
      : channels_(channels), length_(length), data_(static_cast<std::size_t>(channels) * length, T(0)) {
    if (channels < 0 || length < 0) throw ShapeError("feature map dimensions must be nonnegative");
  }

  int channels() const { return channels_; }
  std::int64_t length() const { return length_; }

  T* row(int c) { return data_.data() + static_cast<std::size_t>(c) * length_; }
  const T* row(int c) const { return data_.data() + static_cast<std::size_t>(c) * length_; }

  T& at(int c, std::int64_t t) { return data_[static_cast<std::size_t>(c) * length_ + t]; }
  T at(int c, std::int64_t t) const { return data_[static_cast<std::size_t>(c) * length_ + t]; }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

 private:
  int channels_ = 0;
  std::int64_t length_ = 0;
  std::vector<T> data_;
};

using FeatureMap = BasicFeatureMap<float>;

// One fixed-size granule of a stream; length must equal the executor's
// configured chunk size (or a positive integer multiple of it).
struct Chunk {
  std::vector<float> samples;
  std::int64_t index = 0;
};

// Throws DomainError if any value is NaN or infinite. Core ops call this on
// their outputs so corrupt numbers surface at the operation that made them.
template <typename Range>
inline void ensure_finite(const Range& values, const char* what) {
  for (const auto& v : values) {
    if (!std::isfinite(static_cast<double>(v))) {
      throw DomainError(std::string(what) + ": non-finite value");
    }
  }
}

inline FeatureMap to_feature_map(const AudioBuffer& buf) {
  FeatureMap fm(1, buf.size());
  std::copy(buf.samples.begin(), buf.samples.end(), fm.row(0));
  return fm;
}

inline AudioBuffer to_audio(const FeatureMap& fm, int sample_rate_hz) {
  if (fm.channels() != 1) throw ShapeError("waveform feature map must have one channel");
  return AudioBuffer(std::vector<float>(fm.row(0), fm.row(0) + fm.length()), sample_rate_hz);
}

}  // namespace bwx
