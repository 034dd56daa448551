#include "ecgd/pipeline.hpp"

#include <chrono>
#include <utility>

namespace ecgd {
namespace {

// Runs one stage, records its wall time and tags escaping errors with its name.
template <typename Fn>
auto run_stage(const char* name, Diagnostics& diag, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    diag.stage_ms[name] += std::chrono::duration<double, std::milli>(elapsed).count();
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto result = fn();
      record();
      return result;
    }
  } catch (const Error& e) {
    record();
    throw Error(e.code(), std::string(name) + ": " + e.what(), name);
  }
}

GridGeometry configured_grid(const PipelineConfig& cfg) {
  return GridGeometry{*cfg.grid_px, *cfg.grid_px, true, false};
}

void resolve_grid(const RasterImage* image, const PipelineConfig& cfg, Diagnostics& diag) {
  run_stage("grid", diag, [&] {
    if (image == nullptr) {
      if (!cfg.grid_px) {
        throw Error(Errc::grid_undetected, "no companion image and no configured grid size");
      }
      diag.grid = configured_grid(cfg);
      diag.grid_source = "config";
      return;
    }
    try {
      diag.grid = detect_grid(*image);
      diag.grid_source = "detected";
    } catch (const Error& e) {
      const bool recoverable = e.code() == Errc::grid_undetected || e.code() == Errc::empty_grid;
      if (!recoverable || cfg.grid_fallback != GridFallback::assume_square_default || !cfg.grid_px) throw;
      diag.grid = configured_grid(cfg);
      diag.grid_source = "config";
    }
  });
}

DigitalSignal trace_and_calibrate(const BinaryMask& mask, const PipelineConfig& cfg, Diagnostics& diag) {
  const TraceCost cost{cfg.alpha, cfg.angle_scale};
  diag.trace = run_stage("trace", diag, [&] {
    const PixelTrace raw = viterbi_trace(column_nodes(mask), cost);
    return fill_gaps(raw, {0, mask.width()});
  });
  return run_stage("calibrate", diag, [&] {
    return remove_baseline(pixels_to_physical(diag.trace, diag.grid, cfg.rate, cfg.scale));
  });
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  auto fail = [](const char* what) { throw Error(Errc::invalid_argument, what); };
  if (!(cfg.rate > 0.0)) fail("rate must be positive");
  if (!(cfg.hedge_floor > 0.0 && cfg.hedge_floor <= 1.0)) fail("hedge floor must be in (0, 1]");
  if (!(cfg.hedge_step > 0.0 && cfg.hedge_step < 1.0)) fail("hedge step must be in (0, 1)");
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) fail("alpha must be in [0, 1]");
  if (!(cfg.angle_scale >= 0.0)) fail("angle scale must be non-negative");
  if (cfg.lag_window < 0) fail("lag window must be non-negative");
  if (cfg.grid_px && !(*cfg.grid_px > 0.0)) fail("grid size must be positive");
  if (!(cfg.scale.mv_per_large_square > 0.0 && cfg.scale.sec_per_large_square > 0.0)) {
    fail("calibration constants must be positive");
  }
}

Digitized digitize_raw(const RasterImage& image, const PipelineConfig& cfg) {
  validate(cfg);
  Digitized out;
  Diagnostics& diag = out.diagnostics;
  resolve_grid(&image, cfg, diag);
  diag.traced_mask = run_stage("binarize", diag, [&] {
    HedgingParams params;
    params.floor = cfg.hedge_floor;
    params.step = cfg.hedge_step;
    HedgedMask hedged = adaptive_binarize(to_grayscale(image), params);
    diag.hedging = std::move(hedged.trace);
    return cfg.denoise ? denoise(hedged.mask) : std::move(hedged.mask);
  });
  out.signal = trace_and_calibrate(diag.traced_mask, cfg, diag);
  return out;
}

Digitized digitize_mask(const BinaryMask& mask, const RasterImage* companion, const PipelineConfig& cfg) {
  validate(cfg);
  if (companion != nullptr && !companion->same_shape(mask)) {
    throw Error(Errc::dimension_mismatch, "grid: companion image and mask differ in size", "grid");
  }
  Digitized out;
  Diagnostics& diag = out.diagnostics;
  resolve_grid(companion, cfg, diag);
  diag.traced_mask = mask;
  out.signal = trace_and_calibrate(mask, cfg, diag);
  return out;
}

EvalReport evaluate(const DigitalSignal& pred, const DigitalSignal& ref, const PipelineConfig& cfg) {
  const LagAlignment aligned = align_lag(remove_baseline(pred), remove_baseline(ref), cfg.lag_window);
  const DigitalSignal p = remove_baseline(aligned.pred);
  const DigitalSignal r = remove_baseline(aligned.ref);
  EvalReport report;
  report.lag = aligned.lag;
  report.n_samples = p.size();
  report.mse = mse(p, r);
  report.pearson = pearson(p, r);
  return report;
}

}  // namespace ecgd
