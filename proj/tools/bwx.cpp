// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line harness: weight generation, offline/streaming inference,
// streaming-equivalence checks, latency profiling, band-limited data
// preparation, metrics, and spectrogram emission.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bwx/dsp.hpp"
#include "bwx/executor.hpp"
#include "bwx/graph.hpp"
#include "bwx/losses.hpp"
#include "bwx/stream.hpp"
#include "bwx/wav.hpp"
#include "bwx/weights.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace bwx;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitShape = 3;
constexpr int kExitTolerance = 4;

void write_manifest(const json& manifest, const std::string& primary_output) {
  std::ofstream out(primary_output + ".manifest.json");
  if (!out) throw IoError("cannot write manifest next to " + primary_output);
  out << manifest.dump(2) << "\n";
}

void emit(const json& doc) { std::cout << doc.dump(2) << std::endl; }

json graph_config(int base_channels) {
  return json{{"base_channels", base_channels}, {"strides", {2, 2, 8, 8}}};
}

json params_json(const ParamCounts& c) {
  return json{{"internal_conv_weights", c.internal_weights},
              {"internal_conv_biases", c.internal_biases},
              {"boundary_conv_weights", c.boundary_weights},
              {"boundary_conv_biases", c.boundary_biases},
              {"norm_params", c.norm_params},
              {"total", c.total()}};
}

// Right-trim to a multiple of the base chunk, with a warning on stderr.
AudioBuffer trim_to_chunks(AudioBuffer buf, std::int64_t chunk) {
  const std::int64_t keep = buf.size() / chunk * chunk;
  if (keep == 0) {
    throw SizeError("input shorter than one chunk of " + std::to_string(chunk) + " samples");
  }
  if (keep != buf.size()) {
    std::cerr << "warning: input length " << buf.size() << " is not a multiple of " << chunk
              << "; right-trimming to " << keep << " samples\n";
    buf.samples.resize(keep);
  }
  return buf;
}

struct StreamStats {
  int calls = 0;
  double median_ms = 0.0, mean_ms = 0.0, max_ms = 0.0;
};

StreamStats summarize(std::vector<double> times_ms) {
  StreamStats s;
  s.calls = static_cast<int>(times_ms.size());
  if (times_ms.empty()) return s;
  double total = 0.0;
  for (double t : times_ms) {
    total += t;
    s.max_ms = std::max(s.max_ms, t);
  }
  s.mean_ms = total / s.calls;
  auto mid = times_ms.begin() + times_ms.size() / 2;
  std::nth_element(times_ms.begin(), mid, times_ms.end());
  s.median_ms = *mid;
  return s;
}

int cmd_gen_weights(std::uint64_t seed, int base_channels, const std::string& out_prefix) {
  GraphSpec gen = build_generator(base_channels);
  GraphSpec disc = build_discriminator();
  WeightStore gen_ws = init_weights(gen, seed);
  WeightStore disc_ws = init_multi_scale_weights(disc, seed);

  const std::string gen_path = out_prefix + ".gen.snwt";
  const std::string disc_path = out_prefix + ".disc.snwt";
  save_weights(gen_ws, gen_path);
  save_weights(disc_ws, disc_path);

  const ParamCounts pc = count_params(gen);
  const ParamCounts pc4 = count_params(build_generator(4 * base_channels));

  json manifest{{"command", "gen-weights"},
                {"seed", seed},
                {"graph", graph_config(base_channels)},
                {"outputs", {{"generator", gen_path}, {"discriminator", disc_path}}}};
  write_manifest(manifest, out_prefix);

  json doc{{"command", "gen-weights"},
           {"generator", params_json(pc)},
           {"generator_4x", params_json(pc4)},
           {"internal_weight_ratio_vs_4x",
            double(pc.internal_weights) / double(pc4.internal_weights)},
           {"discriminator_tensors", disc_ws.size()},
           {"files", {{"generator", gen_path}, {"discriminator", disc_path}}},
           {"manifest", manifest}};
  emit(doc);
  return 0;
}

int cmd_run(const std::string& in_path, const std::string& weights_path, const std::string& mode,
            int chunk, const std::string& out_path, int base_channels) {
  GraphSpec g = build_generator(base_channels);
  WeightStore ws = load_weights(weights_path);
  AudioBuffer in = trim_to_chunks(wav_read(in_path), down_stride_product(g));

  json report{{"command", "run"},
              {"mode", mode},
              {"input_samples", in.size()},
              {"sample_rate_hz", in.sample_rate_hz}};

  AudioBuffer out(std::vector<float>(), in.sample_rate_hz);
  if (mode == "offline") {
    out = run_generator(g, ws, in);
  } else {
    StreamExecutor exec(g, ws);
    if (chunk % exec.chunk_size() != 0) {
      throw SizeError("--chunk must be a multiple of " + std::to_string(exec.chunk_size()));
    }
    StreamState state = exec.make_state();
    out.samples.resize(in.samples.size());
    std::vector<double> times_ms;
    std::span<const float> src(in.samples);
    std::span<float> dst(out.samples);
    for (std::int64_t pos = 0; pos < in.size();) {
      const std::int64_t n = std::min<std::int64_t>(chunk, in.size() - pos);
      const auto t0 = std::chrono::steady_clock::now();
      exec.process(state, src.subspan(pos, n), dst.subspan(pos, n));
      const auto t1 = std::chrono::steady_clock::now();
      times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      pos += n;
    }
    const StreamStats stats = summarize(std::move(times_ms));
    report["chunk"] = chunk;
    report["per_call_compute_ms"] = json{{"calls", stats.calls},
                                         {"median", stats.median_ms},
                                         {"mean", stats.mean_ms},
                                         {"max", stats.max_ms}};
  }
  for (float& v : out.samples) v = std::clamp(v, -1.0f, 1.0f);
  wav_write(out, out_path);
  report["output_samples"] = out.size();
  report["output"] = out_path;

  json manifest{{"command", "run"},
                {"graph", graph_config(base_channels)},
                {"mode", mode},
                {"chunk", mode == "stream" ? json(chunk) : json(nullptr)},
                {"input", in_path},
                {"weights", weights_path},
                {"output", out_path},
                {"trimmed_input_samples", in.size()}};
  write_manifest(manifest, out_path);
  report["manifest"] = manifest;
  emit(report);
  return 0;
}

int cmd_compare(const std::string& in_path, const std::string& weights_path,
                std::vector<int> chunks, double tolerance, int base_channels) {
  GraphSpec g = build_generator(base_channels);
  WeightStore ws = load_weights(weights_path);
  AudioBuffer in = trim_to_chunks(wav_read(in_path), down_stride_product(g));

  BoundGraph<float> bg = bind_graph<float>(g, ws);
  FeatureMap offline = run_offline(bg, to_feature_map(in));

  StreamExecutor exec(g, ws);
  json deviations = json::array();
  bool all_ok = true;
  for (int chunk : chunks) {
    if (chunk % exec.chunk_size() != 0) {
      throw SizeError("chunk " + std::to_string(chunk) + " is not a multiple of " +
                      std::to_string(exec.chunk_size()));
    }
    StreamState state = exec.make_state();
    std::vector<float> streamed(in.samples.size());
    std::span<const float> src(in.samples);
    std::span<float> dst(streamed);
    for (std::int64_t pos = 0; pos < in.size();) {
      const std::int64_t n = std::min<std::int64_t>(chunk, in.size() - pos);
      exec.process(state, src.subspan(pos, n), dst.subspan(pos, n));
      pos += n;
    }
    double max_abs = 0.0;
    for (std::int64_t i = 0; i < in.size(); ++i) {
      max_abs = std::max(max_abs, std::abs(double(streamed[i]) - double(offline.at(0, i))));
    }
    all_ok &= max_abs <= tolerance;
    deviations.push_back(json{{"chunk", chunk}, {"max_abs_deviation", max_abs}});
  }

  json doc{{"command", "compare"},
           {"input", in_path},
           {"weights", weights_path},
           {"samples", in.size()},
           {"tolerance", tolerance},
           {"deviations", deviations},
           {"within_tolerance", all_ok},
           {"manifest",
            {{"command", "compare"},
             {"graph", graph_config(base_channels)},
             {"input", in_path},
             {"weights", weights_path},
             {"chunks", chunks},
             {"tolerance", tolerance}}}};
  emit(doc);
  return all_ok ? 0 : kExitTolerance;
}

int cmd_latency(const std::string& weights_path, int base_channels, int rate, int chunks,
                int warmup, std::uint64_t seed) {
  GraphSpec g = build_generator(base_channels);
  WeightStore ws = load_weights(weights_path);
  StreamExecutor exec(g, ws);
  LatencyReport r = probe_latency(exec, rate, chunks, warmup, seed);

  std::cout << r.to_kv();
  json doc{{"command", "latency"},
           {"chunk_samples", r.chunk_samples},
           {"stride_product", r.stride_product},
           {"sample_rate_hz", r.sample_rate_hz},
           {"architectural_latency_ms", r.architectural_latency_ms},
           {"per_chunk_compute_ms", r.per_chunk_compute_ms},
           {"real_time_factor", r.real_time_factor},
           {"timing_scope", "model_compute_only"},
           {"threads", 1},
           // Known single-core measurement of this architecture on a mobile
           // SoC, for context only; never asserted on desk hardware.
           {"mobile_reference", {{"device", "Pixel 4, one CPU core"}, {"per_chunk_ms", 1.5}}},
           {"manifest",
            {{"command", "latency"},
             {"graph", graph_config(base_channels)},
             {"weights", weights_path},
             {"sample_rate_hz", rate},
             {"chunks", chunks},
             {"warmup", warmup},
             {"seed", seed}}}};
  emit(doc);
  return r.real_time_factor < 1.0 ? 0 : kExitTolerance;
}

int cmd_bandpass(const std::string& in_path, const std::string& out_path,
                 const std::string& preset, double low, double high, bool sampled,
                 std::uint64_t seed) {
  AudioBuffer in = wav_read(in_path);

  BandSpec band{};
  json band_desc;
  if (!preset.empty()) {
    band = band_preset(preset);
    band_desc = json{{"preset", preset}, {"low_hz", band.low_hz}, {"high_hz", band.high_hz}};
  } else if (sampled) {
    BandSampler sampler(seed);
    band = sampler.sample();
    band_desc = json{{"sampler", {{"seed", seed}, {"low_range", {0, 300}}, {"high_range", {3400, 4000}}}},
                     {"low_hz", band.low_hz},
                     {"high_hz", band.high_hz}};
  } else {
    band = BandSpec{low, high};
    band_desc = json{{"low_hz", band.low_hz}, {"high_hz", band.high_hz}};
  }

  AudioBuffer out = bandpass(in, band);
  wav_write(out, out_path);

  json manifest{{"command", "bandpass"},
                {"input", in_path},
                {"output", out_path},
                {"band", band_desc}};
  write_manifest(manifest, out_path);
  emit(json{{"command", "bandpass"},
            {"band", band_desc},
            {"samples", out.size()},
            {"output", out_path},
            {"manifest", manifest}});
  return 0;
}

int cmd_metrics(const std::string& est_path, const std::string& ref_path) {
  AudioBuffer est = wav_read(est_path);
  AudioBuffer ref = wav_read(ref_path);
  const double raw = si_sdr(est, ref);
  const double rounded = std::round(raw * 10.0) / 10.0;
  std::printf("si_sdr_db=%.1f\n", rounded);
  emit(json{{"command", "metrics"},
            {"estimate", est_path},
            {"reference", ref_path},
            {"si_sdr_db", rounded},
            {"manifest", {{"command", "metrics"}, {"estimate", est_path}, {"reference", ref_path}}}});
  return 0;
}

int cmd_spectrogram(const std::string& in_path, const std::string& out_path, int window, int hop) {
  AudioBuffer in = wav_read(in_path);
  Spectrogram s = stft_mag(in, window, hop);
  write_spectrogram_csv(s, out_path);
  json manifest{{"command", "spectrogram"},
                {"input", in_path},
                {"output", out_path},
                {"window", window},
                {"hop", hop}};
  write_manifest(manifest, out_path);
  emit(json{{"command", "spectrogram"},
            {"frames", s.frames},
            {"bins", s.bins},
            {"output", out_path},
            {"manifest", manifest}});
  return 0;
}

int cmd_losses(const std::string& ref_path, const std::string& est_path,
               const std::string& weights_path, double rec_weight) {
  AudioBuffer ref = wav_read(ref_path);
  AudioBuffer est = wav_read(est_path);
  if (ref.size() != est.size()) {
    throw ShapeError("losses: reference and estimate must have equal lengths");
  }
  GraphSpec d = build_discriminator();
  WeightStore ws = load_weights(weights_path);

  DiscriminatorOutput real = run_discriminator(d, ws, ref);
  DiscriminatorOutput fake = run_discriminator(d, ws, est);
  LossConfig cfg;
  cfg.rec_weight = rec_weight;
  LossBreakdown b = total_generator_loss(real, fake, cfg);

  emit(json{{"command", "losses"},
            {"rec_weight", rec_weight},
            {"d_loss", b.d_loss},
            {"g_adv", b.g_adv},
            {"g_rec", b.g_rec},
            {"g_total", b.g_total},
            {"scales", real.logits.size()},
            {"feature_layers", real.features.empty() ? 0 : real.features[0].size()},
            {"manifest",
             {{"command", "losses"},
              {"reference", ref_path},
              {"estimate", est_path},
              {"weights", weights_path},
              {"rec_weight", rec_weight}}}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming causal U-Net runtime for speech bandwidth extension"};
  app.require_subcommand(1);

  // gen-weights
  auto* gw = app.add_subcommand("gen-weights", "Generate deterministic generator + discriminator weights");
  std::uint64_t gw_seed = 0;
  int gw_base = 8;
  std::string gw_out;
  gw->add_option("--seed", gw_seed, "Init seed");
  gw->add_option("--base-channels", gw_base, "Generator base width")->check(CLI::PositiveNumber);
  gw->add_option("--out", gw_out, "Output path prefix")->required();

  // run
  auto* rn = app.add_subcommand("run", "Run the generator over a WAV file");
  std::string rn_in, rn_weights, rn_out, rn_mode = "offline";
  int rn_chunk = 256, rn_base = 8;
  rn->add_option("--in", rn_in, "Input WAV")->required();
  rn->add_option("--weights", rn_weights, "Generator weight file")->required();
  rn->add_option("--mode", rn_mode, "offline or stream")
      ->check(CLI::IsMember({"offline", "stream"}));
  rn->add_option("--chunk", rn_chunk, "Samples per streaming call")->check(CLI::PositiveNumber);
  rn->add_option("--out", rn_out, "Output WAV")->required();
  rn->add_option("--base-channels", rn_base, "Generator base width")->check(CLI::PositiveNumber);

  // compare
  auto* cp = app.add_subcommand("compare", "Check streaming output against offline output");
  std::string cp_in, cp_weights;
  std::vector<int> cp_chunks = {256, 512, 1024};
  double cp_tol = 1e-4;
  int cp_base = 8;
  cp->add_option("--in", cp_in, "Input WAV")->required();
  cp->add_option("--weights", cp_weights, "Generator weight file")->required();
  cp->add_option("--chunks", cp_chunks, "Chunk sizes to test");
  cp->add_option("--tolerance", cp_tol, "Max-abs tolerance");
  cp->add_option("--base-channels", cp_base, "Generator base width")->check(CLI::PositiveNumber);

  // latency
  auto* lt = app.add_subcommand("latency", "Profile per-chunk compute and latency");
  std::string lt_weights;
  int lt_base = 8, lt_rate = 16000, lt_chunks = 1000, lt_warmup = 50;
  std::uint64_t lt_seed = 0;
  lt->add_option("--weights", lt_weights, "Generator weight file")->required();
  lt->add_option("--base-channels", lt_base, "Generator base width")->check(CLI::PositiveNumber);
  lt->add_option("--rate", lt_rate, "Sample rate (Hz)")->check(CLI::PositiveNumber);
  lt->add_option("--chunks", lt_chunks, "Measured chunks")->check(CLI::PositiveNumber);
  lt->add_option("--warmup", lt_warmup, "Warm-up chunks");
  lt->add_option("--seed", lt_seed, "Probe input seed");

  // bandpass
  auto* bp = app.add_subcommand("bandpass", "Band-limit a WAV file");
  std::string bp_in, bp_out, bp_preset;
  double bp_low = -1.0, bp_high = -1.0;
  bool bp_sampled = false;
  std::uint64_t bp_seed = 0;
  bp->add_option("--in", bp_in, "Input WAV")->required();
  bp->add_option("--out", bp_out, "Output WAV")->required();
  auto* opt_preset = bp->add_option("--band", bp_preset, "Preset: wide, medium, or narrow");
  auto* opt_low = bp->add_option("--low", bp_low, "Low cutoff (Hz)");
  auto* opt_high = bp->add_option("--high", bp_high, "High cutoff (Hz)");
  auto* opt_sample = bp->add_flag("--sample", bp_sampled, "Draw a variable band");
  bp->add_option("--seed", bp_seed, "Sampler seed (with --sample)");
  opt_preset->excludes(opt_low)->excludes(opt_high)->excludes(opt_sample);
  opt_sample->excludes(opt_low)->excludes(opt_high);
  opt_low->needs(opt_high);

  // metrics
  auto* mt = app.add_subcommand("metrics", "SI-SDR of an estimate against a reference");
  std::string mt_est, mt_ref;
  mt->add_option("--est", mt_est, "Estimate WAV")->required();
  mt->add_option("--ref", mt_ref, "Reference WAV")->required();

  // spectrogram
  auto* sp = app.add_subcommand("spectrogram", "Emit a magnitude spectrogram CSV");
  std::string sp_in, sp_out;
  int sp_window = 512, sp_hop = 128;
  sp->add_option("--in", sp_in, "Input WAV")->required();
  sp->add_option("--out", sp_out, "Output CSV")->required();
  sp->add_option("--window", sp_window, "Window length")->check(CLI::PositiveNumber);
  sp->add_option("--hop", sp_hop, "Hop length")->check(CLI::PositiveNumber);

  // losses
  auto* ls = app.add_subcommand("losses", "Evaluate adversarial and feature losses");
  std::string ls_ref, ls_est, ls_weights;
  double ls_rec_weight = 100.0;
  ls->add_option("--ref", ls_ref, "Reference (real) WAV")->required();
  ls->add_option("--est", ls_est, "Estimate (generated) WAV")->required();
  ls->add_option("--weights", ls_weights, "Discriminator weight file")->required();
  ls->add_option("--rec-weight", ls_rec_weight, "Feature-loss weighting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gw) return cmd_gen_weights(gw_seed, gw_base, gw_out);
    if (*rn) return cmd_run(rn_in, rn_weights, rn_mode, rn_chunk, rn_out, rn_base);
    if (*cp) return cmd_compare(cp_in, cp_weights, cp_chunks, cp_tol, cp_base);
    if (*lt) return cmd_latency(lt_weights, lt_base, lt_rate, lt_chunks, lt_warmup, lt_seed);
    if (*bp) {
      if (bp_preset.empty() && !bp_sampled && (bp_low < 0.0 || bp_high < 0.0)) {
        std::cerr << "bandpass: give --band, --low/--high, or --sample\n";
        return kExitUsage;
      }
      return cmd_bandpass(bp_in, bp_out, bp_preset, bp_low, bp_high, bp_sampled, bp_seed);
    }
    if (*mt) return cmd_metrics(mt_est, mt_ref);
    if (*sp) return cmd_spectrogram(sp_in, sp_out, sp_window, sp_hop);
    if (*ls) return cmd_losses(ls_ref, ls_est, ls_weights, ls_rec_weight);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitShape;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
