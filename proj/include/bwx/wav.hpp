// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string>

#include "bwx/audio.hpp"

namespace bwx {

// RIFF/WAVE, PCM 16-bit little-endian, mono. Samples are scaled to [-1, 1]
// by dividing by 32768. Any sample rate in the header is accepted as-is.
AudioBuffer wav_read(const std::string& path);

// Clamps to [-1, 1] and quantizes with round(x * 32768), clipped to the
// int16 range. Round-trip error is at most 2/32768 per sample.
void wav_write(const AudioBuffer& buf, const std::string& path);

}  // namespace bwx
