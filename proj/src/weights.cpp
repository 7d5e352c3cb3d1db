// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bwx/weights.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace bwx {

void WeightStore::put(std::string name, std::vector<std::uint32_t> dims,
                      std::vector<float> values) {
  std::int64_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  if (n != static_cast<std::int64_t>(values.size())) {
    throw ShapeError("weights: value count does not match dims for " + name);
  }
  auto [it, inserted] = entries_.emplace(std::move(name), TensorEntry{std::move(dims), std::move(values)});
  if (!inserted) throw FormatError("weights: duplicate tensor " + it->first);
}

const TensorEntry* WeightStore::find(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

const TensorEntry& WeightStore::get(const std::string& name) const {
  const TensorEntry* e = find(name);
  if (!e) throw ShapeError("weights: missing tensor " + name);
  return *e;
}

void WeightStore::merge(const WeightStore& other) {
  for (const auto& [name, entry] : other) {
    auto [it, inserted] = entries_.emplace(name, entry);
    if (!inserted) throw FormatError("weights: duplicate tensor " + name + " in merge");
  }
}

namespace {

std::vector<float> draw_uniform(const CounterRng& rng, std::int64_t n, double bound) {
  std::vector<float> v(n);
  for (std::int64_t i = 0; i < n; ++i) {
    v[i] = static_cast<float>(rng.symmetric(static_cast<std::uint64_t>(i)) * bound);
  }
  return v;
}

}  // namespace

WeightStore init_weights(const GraphSpec& g, std::uint64_t seed, const std::string& prefix) {
  WeightStore ws;
  ws.seed = seed;
  for (const LayerSpec& l : g.layers) {
    if (l.kind == LayerKind::conv || l.kind == LayerKind::transposed_conv) {
      const ConvShape& s = l.conv;
      const std::string wname = prefix + l.name + ".w";
      const int fan_in = (s.in_channels / s.groups) * s.kernel_size;
      const double bound = std::sqrt(1.0 / fan_in);
      CounterRng rng(seed, wname);
      ws.put(wname,
             {static_cast<std::uint32_t>(s.out_channels),
              static_cast<std::uint32_t>(s.in_channels / s.groups),
              static_cast<std::uint32_t>(s.kernel_size)},
             draw_uniform(rng, s.weight_count(), bound));
      ws.put(prefix + l.name + ".b", {static_cast<std::uint32_t>(s.out_channels)},
             std::vector<float>(s.out_channels, 0.0f));
    } else if (l.kind == LayerKind::layer_norm) {
      ws.put(prefix + l.name + ".g", {static_cast<std::uint32_t>(l.norm_channels)},
             std::vector<float>(l.norm_channels, 1.0f));
      ws.put(prefix + l.name + ".b", {static_cast<std::uint32_t>(l.norm_channels)},
             std::vector<float>(l.norm_channels, 0.0f));
    }
  }
  return ws;
}

std::string scale_prefix(int scale) { return "d" + std::to_string(scale) + "."; }

WeightStore init_multi_scale_weights(const GraphSpec& g, std::uint64_t seed, int scales) {
  WeightStore ws;
  ws.seed = seed;
  for (int k = 0; k < scales; ++k) {
    ws.merge(init_weights(g, seed, scale_prefix(k)));
  }
  return ws;
}

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Reader {
  const unsigned char* p;
  const unsigned char* end;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n) throw FormatError("weights: file truncated");
  }
  std::uint8_t u8() {
    need(1);
    return *p++;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(p[0] | p[1] << 8);
    p += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
                      std::uint32_t(p[3]) << 24;
    p += 4;
    return v;
  }
};

}  // namespace

void save_weights(const WeightStore& ws, const std::string& path) {
  std::string blob;
  blob.append("SNWT", 4);
  put_u32(blob, 1);  // version
  put_u32(blob, static_cast<std::uint32_t>(ws.size()));
  for (const auto& [name, entry] : ws) {
    if (name.size() > 0xFFFF) throw FormatError("weights: tensor name too long");
    put_u16(blob, static_cast<std::uint16_t>(name.size()));
    blob.append(name);
    blob.push_back(static_cast<char>(entry.dims.size()));
    for (std::uint32_t d : entry.dims) put_u32(blob, d);
    for (float v : entry.values) put_u32(blob, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("weights: cannot open " + path + " for writing");
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw IoError("weights: write failed for " + path);
}

WeightStore load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("weights: cannot open " + path);
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader r{reinterpret_cast<const unsigned char*>(blob.data()),
           reinterpret_cast<const unsigned char*>(blob.data()) + blob.size()};
  r.need(4);
  if (std::memcmp(r.p, "SNWT", 4) != 0) throw FormatError("weights: bad magic");
  r.p += 4;
  const std::uint32_t version = r.u32();
  if (version != 1) throw FormatError("weights: unsupported version " + std::to_string(version));
  const std::uint32_t count = r.u32();

  WeightStore ws;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = r.u16();
    r.need(name_len);
    std::string name(reinterpret_cast<const char*>(r.p), name_len);
    r.p += name_len;
    const std::uint8_t rank = r.u8();
    if (rank > 8) throw FormatError("weights: implausible rank for " + name);
    std::vector<std::uint32_t> dims(rank);
    std::int64_t n = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      dims[d] = r.u32();
      n *= dims[d];
      if (n > (std::int64_t(1) << 31)) throw FormatError("weights: implausible size for " + name);
    }
    std::vector<float> values(n);
    r.need(static_cast<std::size_t>(n) * 4);
    for (std::int64_t v = 0; v < n; ++v) {
      std::uint32_t bits = r.u32();
      values[v] = std::bit_cast<float>(bits);
    }
    ws.put(std::move(name), std::move(dims), std::move(values));
  }
  if (r.p != r.end) throw FormatError("weights: trailing bytes");
  return ws;
}

void validate_weights(const GraphSpec& g, const WeightStore& ws, const std::string& prefix) {
  auto expect = [&](const std::string& name, const std::vector<std::uint32_t>& dims) {
    const TensorEntry& e = ws.get(name);
    if (e.dims != dims) throw ShapeError("weights: shape mismatch for " + name);
  };
  for (const LayerSpec& l : g.layers) {
    if (l.kind == LayerKind::conv || l.kind == LayerKind::transposed_conv) {
      const ConvShape& s = l.conv;
      expect(prefix + l.name + ".w",
             {static_cast<std::uint32_t>(s.out_channels),
              static_cast<std::uint32_t>(s.in_channels / s.groups),
              static_cast<std::uint32_t>(s.kernel_size)});
      expect(prefix + l.name + ".b", {static_cast<std::uint32_t>(s.out_channels)});
    } else if (l.kind == LayerKind::layer_norm) {
      expect(prefix + l.name + ".g", {static_cast<std::uint32_t>(l.norm_channels)});
      expect(prefix + l.name + ".b", {static_cast<std::uint32_t>(l.norm_channels)});
    }
  }
}

}  // namespace bwx
