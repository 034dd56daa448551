#pragma once

#include <map>
#include <optional>
#include <string>

#include "ecgd/binarize.hpp"
#include "ecgd/calibrate.hpp"
#include "ecgd/grid.hpp"
#include "ecgd/metrics.hpp"
#include "ecgd/trace.hpp"

namespace ecgd {

enum class InputMode { raw_image, external_mask };
enum class GridFallback { error, assume_square_default };

struct PipelineConfig {
  InputMode mode = InputMode::raw_image;
  double rate = 100.0;
  double hedge_floor = 0.6;
  double hedge_step = 0.95;
  double alpha = 0.5;
  double angle_scale = 1.0;
  int lag_window = 10;
  bool denoise = false;
  GridFallback grid_fallback = GridFallback::error;
  // Square size used when the grid cannot be measured and the fallback allows it,
  // or always in mask mode without a companion image.
  std::optional<double> grid_px;
  CalibrationConstants scale{};
};

/// Throws Errc::invalid_argument for out-of-range fields.
void validate(const PipelineConfig& cfg);

struct Diagnostics {
  GridGeometry grid;
  std::string grid_source;  // "detected" or "config"
  std::optional<HedgingTrace> hedging;
  PixelTrace trace;
  BinaryMask traced_mask;
  std::map<std::string, double> stage_ms;
};

struct Digitized {
  DigitalSignal signal;
  Diagnostics diagnostics;
};

/// Raw mode: grid from the color image, adaptive binarization, tracing.
Digitized digitize_raw(const RasterImage& image, const PipelineConfig& cfg);

/// Mask mode: the mask is traced directly; the companion image only feeds
/// grid detection.
Digitized digitize_mask(const BinaryMask& mask, const RasterImage* companion, const PipelineConfig& cfg);

/// Lag alignment, median baseline removal on both signals, truncation to the
/// overlap, then MSE and Pearson.
EvalReport evaluate(const DigitalSignal& pred, const DigitalSignal& ref, const PipelineConfig& cfg = {});

}  // namespace ecgd
