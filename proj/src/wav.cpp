// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace bwx {

namespace {

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("wav: truncated header");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

std::uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  if (!in) throw FormatError("wav: truncated header");
  return std::uint16_t(b[0] | b[1] << 8);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

void expect_tag(std::istream& in, const char* tag) {
  char got[4];
  in.read(got, 4);
  if (!in || std::memcmp(got, tag, 4) != 0) {
    throw FormatError(std::string("wav: expected '") + tag + "' tag");
  }
}

}  // namespace

AudioBuffer wav_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("wav: cannot open " + path);

  expect_tag(in, "RIFF");
  read_u32(in);  // riff size, unreliable in the wild; ignore
  expect_tag(in, "WAVE");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;

  // Walk chunks until "data"; skip everything else (LIST, fact, ...).
  while (true) {
    char tag[4];
    in.read(tag, 4);
    if (!in) throw FormatError("wav: no data chunk");
    std::uint32_t size = read_u32(in);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("wav: short fmt chunk");
      format = read_u16(in);
      channels = read_u16(in);
      sample_rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      in.ignore(size - 16 + (size & 1));
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
      if (format != 1) throw UnsupportedFormatError("wav: only PCM supported");
      if (channels != 1) throw UnsupportedFormatError("wav: only mono supported");
      if (bits != 16) throw UnsupportedFormatError("wav: only 16-bit supported");
      if (sample_rate == 0) throw FormatError("wav: zero sample rate");
      if (size % 2 != 0) throw FormatError("wav: odd data chunk size");

      std::uint32_t frames = size / 2;
      std::vector<char> raw(size);
      in.read(raw.data(), size);
      if (static_cast<std::uint32_t>(in.gcount()) != size) {
        throw FormatError("wav: data chunk shorter than header claims");
      }
      std::vector<float> samples(frames);
      for (std::uint32_t i = 0; i < frames; ++i) {
        std::int16_t s = static_cast<std::int16_t>(
            std::uint16_t(static_cast<unsigned char>(raw[2 * i])) |
            std::uint16_t(static_cast<unsigned char>(raw[2 * i + 1])) << 8);
        samples[i] = static_cast<float>(s) / 32768.0f;
      }
      AudioBuffer buf(std::move(samples), static_cast<int>(sample_rate));
      ensure_finite(buf.samples, "wav_read");
      return buf;
    } else {
      in.ignore(size + (size & 1));
      if (!in) throw FormatError("wav: truncated chunk");
    }
  }
}

void wav_write(const AudioBuffer& buf, const std::string& path) {
  ensure_finite(buf.samples, "wav_write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("wav: cannot open " + path + " for writing");

  const std::uint32_t frames = static_cast<std::uint32_t>(buf.samples.size());
  const std::uint32_t data_size = frames * 2;

  out.write("RIFF", 4);
  write_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, 1);  // PCM
  write_u16(out, 1);  // mono
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate_hz));
  write_u32(out, static_cast<std::uint32_t>(buf.sample_rate_hz) * 2);
  write_u16(out, 2);   // block align
  write_u16(out, 16);  // bits
  out.write("data", 4);
  write_u32(out, data_size);

  for (float v : buf.samples) {
    float c = std::clamp(v, -1.0f, 1.0f);
    long q = std::lround(static_cast<double>(c) * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    write_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  if (!out) throw IoError("wav: write failed for " + path);
}

}  // namespace bwx
