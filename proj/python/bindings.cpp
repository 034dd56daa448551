#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ecgd/binarize.hpp"
#include "ecgd/cli.hpp"
#include "ecgd/image_io.hpp"
#include "ecgd/pipeline.hpp"
#include "ecgd/serialize.hpp"
#include "ecgd/synth.hpp"

namespace py = pybind11;
using namespace ecgd;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

RasterImage to_raster(const U8Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an (H, W, 3) uint8 array");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  std::vector<Rgb> px(w * h);
  const std::uint8_t* d = a.data();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = Rgb{d[3 * i], d[3 * i + 1], d[3 * i + 2]};
  return RasterImage(w, h, std::move(px));
}

U8Array from_raster(const RasterImage& img) {
  U8Array out({img.height(), img.width(), std::size_t{3}});
  std::uint8_t* d = out.mutable_data();
  std::size_t i = 0;
  for (Rgb px : img.pixels()) {
    d[i++] = px.r;
    d[i++] = px.g;
    d[i++] = px.b;
  }
  return out;
}

GrayImage to_gray(const U8Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected an (H, W) uint8 array");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  return GrayImage(w, h, std::vector<std::uint8_t>(a.data(), a.data() + w * h));
}

U8Array from_gray(const GrayImage& img) {
  U8Array out({img.height(), img.width()});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

BinaryMask to_mask(const BoolArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected an (H, W) bool array");
  const auto h = static_cast<std::size_t>(a.shape(0));
  const auto w = static_cast<std::size_t>(a.shape(1));
  BinaryMask mask(w, h);
  const bool* d = a.data();
  for (std::size_t i = 0; i < w * h; ++i) mask.pixels()[i] = d[i] ? Mark::signal : Mark::background;
  return mask;
}

BoolArray from_mask(const BinaryMask& mask) {
  BoolArray out({mask.height(), mask.width()});
  bool* d = out.mutable_data();
  for (std::size_t i = 0; i < mask.size(); ++i) d[i] = mask.pixels()[i] == Mark::signal;
  return out;
}

ColumnNodes to_nodes(const std::vector<std::vector<double>>& columns, std::size_t height) {
  return ColumnNodes{height, columns};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ECG trace image digitization";
  m.attr("__version__") = ecgd::cli::kToolVersion;

  static py::exception<Error> error_type(m, "EcgdError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(e.what());
      PyObject_SetAttrString(exc.ptr(), "code", py::str(std::string(to_string(e.code()))).ptr());
      PyObject_SetAttrString(exc.ptr(), "stage", py::str(e.stage()).ptr());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<DigitalSignal>(m, "DigitalSignal")
      .def(py::init<>())
      .def(py::init([](double fs, std::vector<double> mv) { return DigitalSignal{fs, std::move(mv)}; }),
           py::arg("fs"), py::arg("mv"))
      .def_readwrite("fs", &DigitalSignal::sampling_rate)
      .def_readwrite("mv", &DigitalSignal::mv)
      .def("__len__", &DigitalSignal::size)
      .def("to_json", &signal_to_json)
      .def_static("from_json", [](const std::string& s) { return signal_from_json(s); });

  py::class_<GridGeometry>(m, "GridGeometry")
      .def(py::init<>())
      .def(py::init([](double w, double h) { return GridGeometry{w, h, false, false}; }))
      .def_readwrite("width_pixels", &GridGeometry::width_pixels)
      .def_readwrite("height_pixels", &GridGeometry::height_pixels)
      .def_readwrite("square_assumed", &GridGeometry::square_assumed)
      .def_readwrite("large_from_bimodal", &GridGeometry::large_from_bimodal);

  py::class_<LineSet>(m, "LineSet")
      .def_property_readonly("verticals",
                             [](const LineSet& l) {
                               std::vector<double> v;
                               for (const auto& d : l.verticals) v.push_back(d.position);
                               return v;
                             })
      .def_property_readonly("horizontals", [](const LineSet& l) {
        std::vector<double> v;
        for (const auto& d : l.horizontals) v.push_back(d.position);
        return v;
      });

  py::class_<HedgingTrace>(m, "HedgingTrace")
      .def_readonly("otsu_threshold", &HedgingTrace::otsu_threshold)
      .def_readonly("factors", &HedgingTrace::factors)
      .def_readonly("final_factor", &HedgingTrace::final_factor)
      .def_property_readonly("stop_reason", [](const HedgingTrace& h) { return std::string(to_string(h.stop_reason)); });

  py::class_<PixelTrace>(m, "PixelTrace")
      .def_readonly("first_column", &PixelTrace::first_column)
      .def_readonly("y", &PixelTrace::y)
      .def_property_readonly("gaps_filled", [](const PixelTrace& t) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& g : t.gaps_filled) out.emplace_back(g.begin, g.end);
        return out;
      });

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("mse", &EvalReport::mse)
      .def_readonly("pearson", &EvalReport::pearson)
      .def_readonly("lag", &EvalReport::lag)
      .def_readonly("iou", &EvalReport::iou)
      .def_readonly("n_samples", &EvalReport::n_samples);

  py::class_<AggregateReport>(m, "AggregateReport")
      .def_readonly("group", &AggregateReport::group)
      .def_readonly("n", &AggregateReport::n)
      .def_readonly("mse_mean", &AggregateReport::mse_mean)
      .def_readonly("mse_std", &AggregateReport::mse_std)
      .def_readonly("mse_max", &AggregateReport::mse_max)
      .def_readonly("rho_mean", &AggregateReport::rho_mean)
      .def_readonly("rho_min", &AggregateReport::rho_min)
      .def_readonly("rho_std", &AggregateReport::rho_std);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_property(
          "mode", [](const PipelineConfig& c) { return c.mode == InputMode::raw_image ? "raw" : "mask"; },
          [](PipelineConfig& c, const std::string& v) {
            if (v != "raw" && v != "mask") throw py::value_error("mode must be 'raw' or 'mask'");
            c.mode = v == "raw" ? InputMode::raw_image : InputMode::external_mask;
          })
      .def_readwrite("rate", &PipelineConfig::rate)
      .def_readwrite("hedge_floor", &PipelineConfig::hedge_floor)
      .def_readwrite("hedge_step", &PipelineConfig::hedge_step)
      .def_readwrite("alpha", &PipelineConfig::alpha)
      .def_readwrite("angle_scale", &PipelineConfig::angle_scale)
      .def_readwrite("lag_window", &PipelineConfig::lag_window)
      .def_readwrite("denoise", &PipelineConfig::denoise)
      .def_readwrite("grid_px", &PipelineConfig::grid_px)
      .def_property(
          "grid_fallback",
          [](const PipelineConfig& c) {
            return c.grid_fallback == GridFallback::error ? "error" : "assume-square-default";
          },
          [](PipelineConfig& c, const std::string& v) {
            c.grid_fallback = v == "error" ? GridFallback::error : GridFallback::assume_square_default;
          });

  py::class_<Wave>(m, "Wave")
      .def(py::init<>())
      .def(py::init([](double a, double w, double o) { return Wave{a, w, o}; }), py::arg("amplitude_mv"),
           py::arg("width_s"), py::arg("offset_s"))
      .def_readwrite("amplitude_mv", &Wave::amplitude_mv)
      .def_readwrite("width_s", &Wave::width_s)
      .def_readwrite("offset_s", &Wave::offset_s);

  py::class_<SignalSpec>(m, "SignalSpec")
      .def(py::init<>())
      .def_readwrite("duration_s", &SignalSpec::duration_s)
      .def_readwrite("heart_rate_bpm", &SignalSpec::heart_rate_bpm)
      .def_readwrite("first_beat_s", &SignalSpec::first_beat_s)
      .def_readwrite("p", &SignalSpec::p)
      .def_readwrite("q", &SignalSpec::q)
      .def_readwrite("r", &SignalSpec::r)
      .def_readwrite("s", &SignalSpec::s)
      .def_readwrite("t", &SignalSpec::t)
      .def_readwrite("noise_mv", &SignalSpec::noise_mv)
      .def_readwrite("seed", &SignalSpec::seed);

  py::class_<RenderSpec>(m, "RenderSpec")
      .def(py::init<>())
      .def_readwrite("h_spacing", &RenderSpec::h_spacing)
      .def_readwrite("v_spacing", &RenderSpec::v_spacing)
      .def_readwrite("grid_offset_x", &RenderSpec::grid_offset_x)
      .def_readwrite("grid_offset_y", &RenderSpec::grid_offset_y)
      .def_readwrite("minor_lines", &RenderSpec::minor_lines)
      .def_readwrite("thickness", &RenderSpec::thickness)
      .def_readwrite("width", &RenderSpec::width)
      .def_readwrite("height", &RenderSpec::height)
      .def_readwrite("baseline_row", &RenderSpec::baseline_row);

  // raster
  m.def("to_grayscale", [](const U8Array& rgb) { return from_gray(to_grayscale(to_raster(rgb))); });
  m.def("binarize_fixed", [](const U8Array& gray, double t) { return from_mask(binarize_fixed(to_gray(gray), t)); });
  m.def("decode_image", [](const py::bytes& data) {
    const std::string s = data;
    return from_raster(decode_image(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
  });
  m.def("encode_png", [](const U8Array& rgb) {
    const Bytes b = encode_png(to_raster(rgb));
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
  });

  // grid
  m.def("isolate_grid_pixels", [](const U8Array& rgb) { return from_mask(isolate_grid_pixels(to_raster(rgb))); });
  m.def("detect_lines", [](const BoolArray& mask) { return detect_lines(to_mask(mask)); });
  m.def("estimate_grid", &estimate_grid);
  m.def("grid_detectable", [](const BoolArray& mask) { return grid_detectable(to_mask(mask)); });
  m.def("detect_grid", [](const U8Array& rgb) { return detect_grid(to_raster(rgb)); });

  // binarize
  m.def("otsu_threshold", [](const U8Array& gray) {
    const OtsuResult r = otsu_threshold(to_gray(gray));
    return py::make_tuple(r.threshold, r.degenerate);
  });
  m.def(
      "adaptive_binarize",
      [](const U8Array& gray, double step, double floor) {
        HedgingParams params;
        params.step = step;
        params.floor = floor;
        HedgedMask r = adaptive_binarize(to_gray(gray), params);
        return py::make_tuple(from_mask(r.mask), r.trace);
      },
      py::arg("gray"), py::arg("step") = 0.95, py::arg("floor") = 0.6);
  m.def(
      "denoise", [](const BoolArray& mask, std::size_t min_area) { return from_mask(denoise(to_mask(mask), min_area)); },
      py::arg("mask"), py::arg("min_area") = 4);

  // trace
  m.def("column_nodes", [](const BoolArray& mask) { return column_nodes(to_mask(mask)).columns; });
  m.def(
      "viterbi_trace",
      [](const std::vector<std::vector<double>>& columns, double alpha, double angle_scale) {
        return viterbi_trace(to_nodes(columns, 0), TraceCost{alpha, angle_scale});
      },
      py::arg("columns"), py::arg("alpha") = 0.5, py::arg("angle_scale") = 1.0);
  m.def("fill_gaps", [](const PixelTrace& t, std::size_t begin, std::size_t end) {
    return fill_gaps(t, ColumnInterval{begin, end});
  });

  // calibrate
  m.def(
      "pixels_to_physical",
      [](const PixelTrace& t, const GridGeometry& g, double rate) { return pixels_to_physical(t, g, rate); },
      py::arg("trace"), py::arg("grid"), py::arg("rate") = 100.0);
  m.def(
      "align_lag",
      [](const DigitalSignal& pred, const DigitalSignal& ref, int max_lag) {
        LagAlignment a = align_lag(pred, ref, max_lag);
        return py::make_tuple(a.lag, a.pred, a.ref);
      },
      py::arg("pred"), py::arg("ref"), py::arg("max_lag") = 10);
  m.def("remove_baseline", &remove_baseline);

  // metrics
  m.def("mse", py::overload_cast<const DigitalSignal&, const DigitalSignal&>(&mse));
  m.def("pearson", py::overload_cast<const DigitalSignal&, const DigitalSignal&>(&pearson));
  m.def("iou", [](const BoolArray& a, const BoolArray& b) { return iou(to_mask(a), to_mask(b)); });
  m.def("aggregate", [](const std::vector<EvalReport>& reports, const std::string& group) {
    return aggregate(reports, group);
  });

  // synth
  m.def("gen_signal", &gen_signal, py::arg("spec"), py::arg("rate") = 100.0);
  m.def("rasterize", [](const DigitalSignal& sig, const RenderSpec& spec) {
    const Rendering r = rasterize(sig, spec);
    py::dict out;
    out["image"] = from_raster(r.image);
    out["mask"] = from_mask(r.mask);
    out["grid"] = r.grid;
    out["clipped"] = r.clipped;
    return out;
  });
  m.def("inject_overlap", [](const U8Array& rgb, const BoolArray& mask, const DigitalSignal& other,
                             const RenderSpec& spec, std::uint64_t seed) {
    const Contaminated c = inject_overlap(to_raster(rgb), to_mask(mask), other, spec, seed);
    return py::make_tuple(from_raster(c.image), from_mask(c.mask));
  });

  // pipeline
  m.def(
      "digitize_raw",
      [](const U8Array& rgb, const PipelineConfig& cfg) {
        Digitized d = digitize_raw(to_raster(rgb), cfg);
        return py::make_tuple(d.signal, d.diagnostics.grid);
      },
      py::arg("image"), py::arg("config") = PipelineConfig{});
  m.def(
      "digitize_mask",
      [](const BoolArray& mask, std::optional<U8Array> companion, const PipelineConfig& cfg) {
        std::optional<RasterImage> img;
        if (companion) img = to_raster(*companion);
        Digitized d = digitize_mask(to_mask(mask), img ? &*img : nullptr, cfg);
        return py::make_tuple(d.signal, d.diagnostics.grid);
      },
      py::arg("mask"), py::arg("companion") = py::none(), py::arg("config") = PipelineConfig{});
  m.def("evaluate", &evaluate, py::arg("pred"), py::arg("ref"), py::arg("config") = PipelineConfig{});

  m.def("cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "ecgd");
    py::gil_scoped_release release;
    return ecgd::cli::run(args);
  });
}
