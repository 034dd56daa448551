#include "ecgd/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ecgd/rng.hpp"

namespace ecgd {
namespace {

double bump(const Wave& w, double t, double r_peak) {
  const double z = (t - (r_peak + w.offset_s)) / w.width_s;
  return w.amplitude_mv * std::exp(-0.5 * z * z);
}

double px_per_sample(const RenderSpec& spec, double rate) {
  return spec.h_spacing / (rate * spec.scale.sec_per_large_square);
}

double px_per_mv(const RenderSpec& spec) { return spec.v_spacing / spec.scale.mv_per_large_square; }

double centred_baseline(const DigitalSignal& sig, const RenderSpec& spec) {
  const auto [lo, hi] = std::ranges::minmax(sig.mv);
  return 0.5 * static_cast<double>(spec.height - 1) + 0.5 * (lo + hi) * px_per_mv(spec);
}

// Integer positions offset + k*step inside [0, limit).
std::vector<double> line_positions(double offset, double step, std::size_t limit) {
  std::vector<double> out;
  const double first = std::ceil((-0.5 - offset) / step);
  for (double k = first;; k += 1.0) {
    const double pos = std::round(offset + k * step);
    if (pos >= static_cast<double>(limit)) break;
    if (pos >= 0.0 && (out.empty() || out.back() != pos)) out.push_back(pos);
  }
  return out;
}

}  // namespace

void validate(const SignalSpec& spec) {
  if (!(spec.duration_s > 0.0)) throw Error(Errc::invalid_argument, "duration must be positive");
  if (!(spec.heart_rate_bpm > 0.0)) throw Error(Errc::invalid_argument, "heart rate must be positive");
  if (!(spec.noise_mv >= 0.0)) throw Error(Errc::invalid_argument, "noise amplitude must be non-negative");
  for (const Wave* w : {&spec.p, &spec.q, &spec.r, &spec.s, &spec.t}) {
    if (std::abs(w->amplitude_mv) > 2.0) throw Error(Errc::invalid_argument, "wave amplitude exceeds 2 mV");
    if (!(w->width_s > 0.0)) throw Error(Errc::invalid_argument, "wave width must be positive");
  }
}

void validate(const RenderSpec& spec) {
  if (spec.h_spacing < 8.0 || spec.v_spacing < 8.0) {
    throw Error(Errc::invalid_argument, "grid spacing must be at least 8 px");
  }
  if (spec.thickness < 1) throw Error(Errc::invalid_argument, "trace thickness must be at least 1 px");
  if (static_cast<double>(spec.width) < spec.h_spacing || static_cast<double>(spec.height) < spec.v_spacing) {
    throw Error(Errc::invalid_argument, "canvas must fit one large square in each direction");
  }
  if (!(spec.scale.mv_per_large_square > 0.0 && spec.scale.sec_per_large_square > 0.0)) {
    throw Error(Errc::invalid_argument, "calibration constants must be positive");
  }
  const std::array<Rgb, 4> colors{spec.trace_color, spec.bold_color, spec.minor_color, spec.background};
  for (std::size_t i = 0; i < colors.size(); ++i) {
    for (std::size_t j = i + 1; j < colors.size(); ++j) {
      if (std::abs(int{luma(colors[i])} - int{luma(colors[j])}) < 30) {
        throw Error(Errc::invalid_argument, "render colors must differ by at least 30 gray levels");
      }
    }
  }
}

DigitalSignal gen_signal(const SignalSpec& spec, double rate) {
  validate(spec);
  if (!(rate > 0.0)) throw Error(Errc::invalid_argument, "sampling rate must be positive");
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(spec.duration_s * rate)));
  const double rr = 60.0 / spec.heart_rate_bpm;

  std::vector<double> peaks;
  // One beat before the window so its T wave can spill in.
  for (double t = spec.first_beat_s - rr; t <= spec.duration_s + rr; t += rr) peaks.push_back(t);

  DigitalSignal sig;
  sig.sampling_rate = rate;
  sig.mv.assign(n, 0.0);
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    double v = 0.0;
    for (double peak : peaks) {
      for (const Wave* w : {&spec.p, &spec.q, &spec.r, &spec.s, &spec.t}) v += bump(*w, t, peak);
    }
    if (spec.noise_mv > 0.0) v += spec.noise_mv * rng.normal();
    sig.mv[i] = v;
  }
  return sig;
}

BinaryMask render_trace_mask(const DigitalSignal& sig, const RenderSpec& spec, double baseline_row,
                             bool* clipped) {
  validate(sig);
  const double dx = px_per_sample(spec, sig.sampling_rate);
  const double scale = px_per_mv(spec);
  const double max_row = static_cast<double>(spec.height - 1);
  const double x_last = dx * static_cast<double>(sig.size() - 1);
  if (x_last > static_cast<double>(spec.width - 1)) {
    throw Error(Errc::invalid_argument, "signal is longer than the canvas at this time scale");
  }

  bool any_clipped = false;
  std::vector<double> rows(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    const double y = baseline_row - sig.mv[i] * scale;
    if (y < 0.0 || y > max_row) any_clipped = true;
    rows[i] = std::clamp(y, 0.0, max_row);
  }
  if (clipped != nullptr) *clipped = any_clipped;

  auto row_at = [&](double x) {
    if (rows.size() == 1) return rows.front();
    const double u = std::clamp(x / dx, 0.0, static_cast<double>(rows.size() - 1));
    const auto lo = std::min(static_cast<std::size_t>(u), rows.size() - 2);
    const double frac = u - static_cast<double>(lo);
    return rows[lo] + frac * (rows[lo + 1] - rows[lo]);
  };

  BinaryMask mask(spec.width, spec.height);
  const double half = 0.5 * spec.thickness;
  const auto last_column = std::min(static_cast<std::size_t>(std::floor(x_last + 0.5)), spec.width - 1);
  for (std::size_t c = 0; c <= last_column; ++c) {
    // Vertical extent of the polyline over this column's footprint.
    const double x0 = std::max(0.0, static_cast<double>(c) - 0.5);
    const double x1 = std::min(x_last, static_cast<double>(c) + 0.5);
    double lo = std::min(row_at(x0), row_at(x1));
    double hi = std::max(row_at(x0), row_at(x1));
    for (auto i = static_cast<std::size_t>(std::ceil(x0 / dx)); i < rows.size(); ++i) {
      const double x = dx * static_cast<double>(i);
      if (x > x1) break;
      lo = std::min(lo, rows[i]);
      hi = std::max(hi, rows[i]);
    }
    const auto first = static_cast<long>(std::ceil(lo - half));
    const auto last = static_cast<long>(std::ceil(hi + half)) - 1;
    for (long r = std::max(0L, first); r <= std::min(last, static_cast<long>(spec.height) - 1); ++r) {
      mask.set(c, static_cast<std::size_t>(r), true);
    }
  }
  return mask;
}

Rendering rasterize(const DigitalSignal& sig, const RenderSpec& spec) {
  validate(spec);
  validate(sig);
  Rendering out;
  out.image = RasterImage(spec.width, spec.height, spec.background);

  if (spec.minor_lines) {
    for (double x : line_positions(spec.grid_offset_x, spec.h_spacing / 5.0, spec.width)) {
      for (std::size_t y = 0; y < spec.height; ++y) out.image.at(static_cast<std::size_t>(x), y) = spec.minor_color;
    }
    for (double y : line_positions(spec.grid_offset_y, spec.v_spacing / 5.0, spec.height)) {
      for (std::size_t x = 0; x < spec.width; ++x) out.image.at(x, static_cast<std::size_t>(y)) = spec.minor_color;
    }
  }
  out.bold_columns = line_positions(spec.grid_offset_x, spec.h_spacing, spec.width);
  out.bold_rows = line_positions(spec.grid_offset_y, spec.v_spacing, spec.height);
  for (double x : out.bold_columns) {
    for (std::size_t y = 0; y < spec.height; ++y) out.image.at(static_cast<std::size_t>(x), y) = spec.bold_color;
  }
  for (double y : out.bold_rows) {
    for (std::size_t x = 0; x < spec.width; ++x) out.image.at(x, static_cast<std::size_t>(y)) = spec.bold_color;
  }

  const double baseline = spec.baseline_row.value_or(centred_baseline(sig, spec));
  out.mask = render_trace_mask(sig, spec, baseline, &out.clipped);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      if (out.mask.signal(x, y)) out.image.at(x, y) = spec.trace_color;
    }
  }
  out.grid = GridGeometry{spec.h_spacing, spec.v_spacing, false, false};
  return out;
}

Contaminated inject_overlap(const RasterImage& img, const BinaryMask& mask, const DigitalSignal& other,
                            const RenderSpec& spec, std::uint64_t seed) {
  if (!img.same_shape(mask)) throw Error(Errc::dimension_mismatch, "image and mask differ in size");
  if (img.height() <= kOverlapBandHeight) {
    throw Error(Errc::invalid_argument, "canvas must be taller than the overlap band");
  }
  RenderSpec other_spec = spec;
  other_spec.width = img.width();
  other_spec.height = img.height();
  const BinaryMask intruder = render_trace_mask(other, other_spec, centred_baseline(other, other_spec));

  long top = -1;
  long bottom = -1;
  for (std::size_t y = 0; y < intruder.height(); ++y) {
    for (std::size_t x = 0; x < intruder.width(); ++x) {
      if (!intruder.signal(x, y)) continue;
      if (top < 0) top = static_cast<long>(y);
      bottom = static_cast<long>(y);
    }
  }

  Rng rng(seed);
  Contaminated out{img, mask, rng.coin()};
  const long jitter = rng.integer(0, 8);
  if (top < 0) return out;

  const auto band = static_cast<long>(kOverlapBandHeight);
  const auto h = static_cast<long>(img.height());
  // A lead above shows its lowest excursions at our top edge; a lead below
  // shows its peaks at our bottom edge.
  const long src_first = out.band_at_top ? bottom + jitter - (band - 1) : top - jitter;
  const long dst_first = out.band_at_top ? 0 : h - band;
  for (long k = 0; k < band; ++k) {
    const long src = src_first + k;
    if (src < 0 || src >= h) continue;
    const auto dst = static_cast<std::size_t>(dst_first + k);
    for (std::size_t x = 0; x < img.width(); ++x) {
      if (!intruder.signal(x, static_cast<std::size_t>(src))) continue;
      out.image.at(x, dst) = spec.trace_color;
      out.mask.set(x, dst, true);
    }
  }
  return out;
}

SignalSpec random_signal_spec(std::uint64_t seed, double duration_s) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  SignalSpec spec;
  spec.duration_s = duration_s;
  spec.heart_rate_bpm = rng.uniform(55.0, 95.0);
  spec.first_beat_s = rng.uniform(0.2, 0.2 + 60.0 / spec.heart_rate_bpm);
  auto jitter = [&rng](Wave w, double lo, double hi) {
    w.amplitude_mv = rng.uniform(lo, hi);
    w.width_s *= rng.uniform(0.85, 1.15);
    return w;
  };
  spec.p = jitter(spec.p, 0.08, 0.16);
  spec.q = jitter(spec.q, -0.10, -0.03);
  spec.r = jitter(spec.r, 0.5, 0.8);
  spec.s = jitter(spec.s, -0.20, -0.05);
  spec.t = jitter(spec.t, 0.15, 0.30);
  spec.noise_mv = 0.0;
  spec.seed = seed;
  return spec;
}

RenderSpec random_render_spec(std::uint64_t seed) {
  Rng rng(seed ^ 0xd1b54a32d192ed03ULL);
  RenderSpec spec;
  spec.h_spacing = static_cast<double>(rng.integer(30, 36));
  spec.v_spacing = spec.h_spacing;
  spec.grid_offset_x = static_cast<double>(rng.integer(0, static_cast<std::int64_t>(spec.h_spacing) - 1));
  spec.grid_offset_y = static_cast<double>(rng.integer(0, static_cast<std::int64_t>(spec.v_spacing) - 1));
  return spec;
}

}  // namespace ecgd
