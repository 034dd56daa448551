#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ecgd/calibrate.hpp"
#include "ecgd/grid.hpp"
#include "ecgd/raster.hpp"

namespace ecgd {

/// One Gaussian bump placed relative to each R peak.
struct Wave {
  double amplitude_mv = 0.0;
  double width_s = 0.01;   // standard deviation
  double offset_s = 0.0;   // relative to the R peak
};

struct SignalSpec {
  double duration_s = 5.0;
  double heart_rate_bpm = 72.0;
  double first_beat_s = 0.4;  // time of the first R peak
  Wave p{0.12, 0.025, -0.18};
  Wave q{-0.08, 0.008, -0.028};
  Wave r{0.8, 0.011, 0.0};
  Wave s{-0.15, 0.009, 0.028};
  Wave t{0.25, 0.045, 0.30};
  double noise_mv = 0.0;  // standard deviation of additive Gaussian noise
  std::uint64_t seed = 0;
};

struct RenderSpec {
  double h_spacing = 40.0;  // px per large square along time
  double v_spacing = 40.0;  // px per large square along voltage
  double grid_offset_x = 0.0;
  double grid_offset_y = 0.0;
  bool minor_lines = true;
  int thickness = 2;
  Rgb trace_color{30, 30, 30};
  Rgb bold_color{240, 115, 115};
  Rgb minor_color{250, 185, 185};
  Rgb background{255, 255, 255};
  std::size_t width = 960;
  std::size_t height = 96;
  // Row of 0 mV. When unset the signal's range is centred vertically.
  std::optional<double> baseline_row;
  CalibrationConstants scale{};
};

/// Throws Errc::invalid_argument when a spec breaks its invariants.
void validate(const SignalSpec& spec);
void validate(const RenderSpec& spec);

DigitalSignal gen_signal(const SignalSpec& spec, double rate = 100.0);

struct Rendering {
  RasterImage image;
  BinaryMask mask;  // trace pixels only
  GridGeometry grid;
  std::vector<double> bold_rows;
  std::vector<double> bold_columns;
  bool clipped = false;
};

/// Draws grid paper and the signal as a connected polyline. Sample i sits at
/// column i * h_spacing / (rate * sec_per_large_square).
Rendering rasterize(const DigitalSignal& sig, const RenderSpec& spec);

/// Trace-only mask for a signal, using the same geometry as rasterize.
BinaryMask render_trace_mask(const DigitalSignal& sig, const RenderSpec& spec, double baseline_row,
                             bool* clipped = nullptr);

struct Contaminated {
  RasterImage image;
  BinaryMask mask;  // union of the clean trace and the intruding one
  bool band_at_top = false;
};

inline constexpr std::size_t kOverlapBandHeight = 30;

/// Pastes a 30-px band of another signal's trace onto the top or bottom edge
/// of the image. The seed chooses the edge and the crop.
Contaminated inject_overlap(const RasterImage& img, const BinaryMask& mask, const DigitalSignal& other,
                            const RenderSpec& spec, std::uint64_t seed);

/// Seeded variations used by corpus generation.
SignalSpec random_signal_spec(std::uint64_t seed, double duration_s);
RenderSpec random_render_spec(std::uint64_t seed);

}  // namespace ecgd
