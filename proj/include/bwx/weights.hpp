// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bwx/graph.hpp"

namespace bwx {

// splitmix64 finalizer; stateless, so values can be drawn by counter.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Counter-based deterministic generator keyed by (seed, stream name).
// Draw i is a pure function of the key and i, identical on every platform.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream)
      : key_(mix64(seed ^ 0xA0761D6478BD642Full) ^ fnv1a64(stream)) {}

  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(mix64(key_ + (counter + 1) * 0x9E3779B97F4A7C15ull) >> 11) *
           0x1.0p-53;
  }

  // Uniform in [-1, 1).
  double symmetric(std::uint64_t counter) const { return 2.0 * uniform01(counter) - 1.0; }

 private:
  std::uint64_t key_;
};

struct TensorEntry {
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::int64_t count() const {
    std::int64_t n = 1;
    for (std::uint32_t d : dims) n *= d;
    return n;
  }
  bool operator==(const TensorEntry&) const = default;
};

// Named tensors bound to a graph. Entries are keyed by layer name plus a
// suffix: ".w" kernel, ".b" bias for convs; ".g" gain, ".b" bias for layer
// norms. Kept sorted by name so serialization is canonical.
class WeightStore {
 public:
  void put(std::string name, std::vector<std::uint32_t> dims, std::vector<float> values);
  const TensorEntry* find(const std::string& name) const;
  const TensorEntry& get(const std::string& name) const;  // throws ShapeError if missing

  void merge(const WeightStore& other);  // throws FormatError on duplicate names

  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const WeightStore& other) const { return entries_ == other.entries_; }

  std::uint64_t seed = 0;  // provenance only; not serialized

 private:
  std::map<std::string, TensorEntry> entries_;
};

// Fan-in-scaled uniform init: weights ~ U(-b, b) with b = sqrt(1/fan_in),
// fan_in = in_channels/groups * kernel_size. Biases zero, norm gains one.
// Deterministic per (seed, prefixed layer name); bit-identical across runs.
WeightStore init_weights(const GraphSpec& g, std::uint64_t seed, const std::string& prefix = "");

// Three structurally identical per-scale weight sets under prefixes
// "d0." / "d1." / "d2.", merged into one store.
WeightStore init_multi_scale_weights(const GraphSpec& g, std::uint64_t seed, int scales = 3);

std::string scale_prefix(int scale);

// Binary container: magic "SNWT", u32 version = 1, u32 entry count; per
// entry: u16 name length, UTF-8 name, u8 rank, u32 dims[rank], then the
// dim-product float32 values. Everything little-endian, no padding.
void save_weights(const WeightStore& ws, const std::string& path);
WeightStore load_weights(const std::string& path);

// Checks every layer of `g` has entries of the right shapes under `prefix`.
// Throws ShapeError with the offending tensor name.
void validate_weights(const GraphSpec& g, const WeightStore& ws, const std::string& prefix = "");

}  // namespace bwx
