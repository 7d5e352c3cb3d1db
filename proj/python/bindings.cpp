// Copyright 2026 The bwx authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bwx/dsp.hpp"
#include "bwx/executor.hpp"
#include "bwx/graph.hpp"
#include "bwx/losses.hpp"
#include "bwx/stream.hpp"
#include "bwx/wav.hpp"
#include "bwx/weights.hpp"

namespace py = pybind11;
using namespace bwx;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

AudioBuffer to_buffer(const FloatArray& arr, int rate) {
  if (arr.ndim() != 1) throw ShapeError("expected a 1-D float array");
  const float* p = arr.data();
  return AudioBuffer(std::vector<float>(p, p + arr.size()), rate);
}

py::array_t<float> to_array(const std::vector<float>& v) {
  py::array_t<float> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<float> to_array_2d(const FeatureMap& fm) {
  py::array_t<float> out({static_cast<py::ssize_t>(fm.channels()),
                          static_cast<py::ssize_t>(fm.length())});
  std::copy(fm.flat().begin(), fm.flat().end(), out.mutable_data());
  return out;
}

py::dict params_dict(const ParamCounts& c) {
  py::dict d;
  d["internal_conv_weights"] = c.internal_weights;
  d["internal_conv_biases"] = c.internal_biases;
  d["boundary_conv_weights"] = c.boundary_weights;
  d["boundary_conv_biases"] = c.boundary_biases;
  d["norm_params"] = c.norm_params;
  d["total"] = c.total();
  return d;
}

py::dict latency_dict(const LatencyReport& r) {
  py::dict d;
  d["chunk_samples"] = r.chunk_samples;
  d["stride_product"] = r.stride_product;
  d["sample_rate_hz"] = r.sample_rate_hz;
  d["architectural_latency_ms"] = r.architectural_latency_ms;
  d["per_chunk_compute_ms"] = r.per_chunk_compute_ms;
  d["real_time_factor"] = r.real_time_factor;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming causal U-Net runtime for speech bandwidth extension";

  py::register_exception<IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<UnsupportedGraphError>(m, "UnsupportedGraphError", PyExc_ValueError);

  m.def("wav_read", [](const std::string& path) {
    AudioBuffer b = wav_read(path);
    return py::make_tuple(to_array(b.samples), b.sample_rate_hz);
  });
  m.def("wav_write", [](const std::string& path, const FloatArray& samples, int rate) {
    wav_write(to_buffer(samples, rate), path);
  });

  py::class_<GraphSpec>(m, "GraphSpec")
      .def_property_readonly("num_layers", [](const GraphSpec& g) { return g.layers.size(); })
      .def_property_readonly("base_channels", [](const GraphSpec& g) { return g.base_channels; })
      .def_property_readonly("strides", [](const GraphSpec& g) { return g.strides; });

  m.def("build_generator", &build_generator, py::arg("base_channels") = 8);
  m.def("build_discriminator", &build_discriminator);
  m.def("validate_graph", &validate_graph);
  m.def("count_params", [](const GraphSpec& g) { return params_dict(count_params(g)); });
  m.def("down_stride_product", &down_stride_product);
  m.def("up_stride_product", &up_stride_product);

  py::class_<WeightStore>(m, "WeightStore")
      .def_property_readonly("num_tensors", [](const WeightStore& w) { return w.size(); })
      .def_property_readonly("seed", [](const WeightStore& w) { return w.seed; })
      .def("__eq__", [](const WeightStore& a, const WeightStore& b) { return a == b; });

  m.def("init_weights", &init_weights, py::arg("graph"), py::arg("seed"), py::arg("prefix") = "");
  m.def("init_multi_scale_weights", &init_multi_scale_weights, py::arg("graph"), py::arg("seed"),
        py::arg("scales") = 3);
  m.def("save_weights", &save_weights);
  m.def("load_weights", &load_weights);

  m.def(
      "run_generator",
      [](const GraphSpec& g, const WeightStore& ws, const FloatArray& samples, int rate) {
        return to_array(run_generator(g, ws, to_buffer(samples, rate)).samples);
      },
      py::arg("graph"), py::arg("weights"), py::arg("samples"), py::arg("rate") = 16000);

  py::class_<DiscriminatorOutput>(m, "DiscriminatorOutput")
      .def_property_readonly("logits",
                             [](const DiscriminatorOutput& o) {
                               py::list scales;
                               for (const auto& l : o.logits) scales.append(to_array(l));
                               return scales;
                             })
      .def_property_readonly("features", [](const DiscriminatorOutput& o) {
        py::list scales;
        for (const auto& per_scale : o.features) {
          py::list layers;
          for (const FeatureMap& fm : per_scale) layers.append(to_array_2d(fm));
          scales.append(layers);
        }
        return scales;
      });

  m.def(
      "run_discriminator",
      [](const GraphSpec& d, const WeightStore& ws, const FloatArray& samples, int rate) {
        return run_discriminator(d, ws, to_buffer(samples, rate));
      },
      py::arg("graph"), py::arg("weights"), py::arg("samples"), py::arg("rate") = 16000);

  py::class_<StreamState>(m, "StreamState")
      .def("reset", &StreamState::reset)
      .def_property_readonly("total_state_floats", &StreamState::total_state_floats);

  py::class_<StreamExecutor>(m, "StreamExecutor")
      .def(py::init<const GraphSpec&, const WeightStore&, std::string>(), py::arg("graph"),
           py::arg("weights"), py::arg("prefix") = "")
      .def_property_readonly("chunk_size", &StreamExecutor::chunk_size)
      .def_property_readonly("output_chunk_size", &StreamExecutor::output_chunk_size)
      .def_property_readonly("stride_product", &StreamExecutor::stride_product)
      .def("make_state", &StreamExecutor::make_state)
      .def("process",
           [](const StreamExecutor& e, StreamState& state, const FloatArray& in) {
             if (in.ndim() != 1) throw ShapeError("expected a 1-D float array");
             std::span<const float> span(in.data(), static_cast<std::size_t>(in.size()));
             return to_array(e.process(state, span));
           })
      .def(
          "probe_latency",
          [](const StreamExecutor& e, int rate, int chunks, int warmup, std::uint64_t seed) {
            return latency_dict(probe_latency(e, rate, chunks, warmup, seed));
          },
          py::arg("sample_rate_hz") = 16000, py::arg("chunks") = 1000, py::arg("warmup") = 50,
          py::arg("seed") = 0);

  m.def("discriminator_loss", &discriminator_loss);
  m.def("generator_adv_loss", &generator_adv_loss);
  m.def("feature_loss", &feature_loss);
  m.def(
      "total_generator_loss",
      [](const DiscriminatorOutput& real, const DiscriminatorOutput& fake, double rec_weight) {
        LossConfig cfg;
        cfg.rec_weight = rec_weight;
        LossBreakdown b = total_generator_loss(real, fake, cfg);
        py::dict d;
        d["d_loss"] = b.d_loss;
        d["g_adv"] = b.g_adv;
        d["g_rec"] = b.g_rec;
        d["g_total"] = b.g_total;
        return d;
      },
      py::arg("real"), py::arg("fake"), py::arg("rec_weight") = 100.0);
  m.def(
      "si_sdr",
      [](const FloatArray& est, const FloatArray& ref, int rate) {
        return si_sdr(to_buffer(est, rate), to_buffer(ref, rate));
      },
      py::arg("estimate"), py::arg("reference"), py::arg("rate") = 16000);

  m.def("band_preset", [](const std::string& name) {
    BandSpec b = band_preset(name);
    return py::make_tuple(b.low_hz, b.high_hz);
  });

  py::class_<BandSampler>(m, "BandSampler")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("sample", [](BandSampler& s) {
        BandSpec b = s.sample();
        return py::make_tuple(b.low_hz, b.high_hz);
      });

  m.def(
      "bandpass",
      [](const FloatArray& samples, int rate, double low_hz, double high_hz) {
        return to_array(bandpass(to_buffer(samples, rate), {low_hz, high_hz}).samples);
      },
      py::arg("samples"), py::arg("rate"), py::arg("low_hz"), py::arg("high_hz"));
  m.def(
      "avg_downsample",
      [](const FloatArray& samples, int rate, int factor) {
        return to_array(avg_downsample(to_buffer(samples, rate), factor).samples);
      },
      py::arg("samples"), py::arg("rate"), py::arg("factor"));
  m.def(
      "stft_mag",
      [](const FloatArray& samples, int rate, int window, int hop) {
        Spectrogram s = stft_mag(to_buffer(samples, rate), window, hop);
        py::array_t<float> out({static_cast<py::ssize_t>(s.frames), static_cast<py::ssize_t>(s.bins)});
        std::copy(s.mag.begin(), s.mag.end(), out.mutable_data());
        return out;
      },
      py::arg("samples"), py::arg("rate") = 16000, py::arg("window") = 512, py::arg("hop") = 128);
}
