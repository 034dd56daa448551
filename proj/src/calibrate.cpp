#include "ecgd/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <span>

namespace ecgd {
namespace {

// Pearson correlation; nullopt when either side is constant.
std::optional<double> correlation(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

struct Overlap {
  std::size_t begin;  // index into ref
  std::size_t end;
};

Overlap overlap_at(int lag, std::size_t pred_size, std::size_t ref_size) {
  const long lo = std::max(0L, static_cast<long>(lag));
  const long hi = std::min(static_cast<long>(ref_size), static_cast<long>(pred_size) + lag);
  if (hi <= lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

void validate(const DigitalSignal& sig) {
  if (!(sig.sampling_rate > 0.0) || !std::isfinite(sig.sampling_rate)) {
    throw Error(Errc::invalid_argument, "sampling rate must be positive");
  }
  if (sig.mv.empty()) throw Error(Errc::invalid_argument, "signal has no samples");
  if (!std::ranges::all_of(sig.mv, [](double v) { return std::isfinite(v); })) {
    throw Error(Errc::invalid_argument, "signal has non-finite samples");
  }
}

DigitalSignal pixels_to_physical(const PixelTrace& trace, const GridGeometry& grid, double rate,
                                 const CalibrationConstants& k) {
  if (!grid.valid()) throw Error(Errc::calibration, "grid spacing must be positive");
  if (!(k.mv_per_large_square > 0.0 && k.sec_per_large_square > 0.0)) {
    throw Error(Errc::calibration, "calibration constants must be positive");
  }
  if (!(rate > 0.0)) throw Error(Errc::invalid_argument, "sampling rate must be positive");
  if (trace.y.empty()) throw Error(Errc::empty_trace, "trace has no columns");
  if (!trace.complete()) throw Error(Errc::calibration, "trace has unfilled columns");

  const double sec_per_column = k.sec_per_large_square / grid.width_pixels;
  const double mv_per_row = k.mv_per_large_square / grid.height_pixels;
  const std::size_t columns = trace.y.size();
  const double duration = static_cast<double>(columns) * sec_per_column;
  const auto samples = static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;

  DigitalSignal out;
  out.sampling_rate = rate;
  out.mv.resize(samples);
  const double last = static_cast<double>(columns - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = std::min(static_cast<double>(i) / rate / sec_per_column, last);
    const auto lo = static_cast<std::size_t>(std::floor(u));
    const std::size_t hi = std::min(lo + 1, columns - 1);
    const double frac = u - static_cast<double>(lo);
    const double row = *trace.y[lo] + frac * (*trace.y[hi] - *trace.y[lo]);
    out.mv[i] = -row * mv_per_row;  // rows grow downward, voltage upward
  }
  return out;
}

LagAlignment align_lag(const DigitalSignal& pred, const DigitalSignal& ref, int max_lag) {
  validate(pred);
  validate(ref);
  if (pred.sampling_rate != ref.sampling_rate) {
    throw Error(Errc::rate_mismatch, "prediction and reference sampling rates differ");
  }
  if (max_lag < 0) throw Error(Errc::invalid_argument, "lag window must be non-negative");

  int best_lag = 0;
  std::optional<double> best_corr;
  // Visiting 0, -1, +1, -2, +2, ... and keeping only strict improvements
  // resolves ties toward small |lag| and then toward negative lag.
  for (int step = 0; step <= 2 * max_lag; ++step) {
    const int lag = (step % 2 == 1) ? -(step + 1) / 2 : step / 2;
    const Overlap ov = overlap_at(lag, pred.size(), ref.size());
    if (ov.end - ov.begin < 2) continue;
    const std::span<const double> r(ref.mv.data() + ov.begin, ov.end - ov.begin);
    const std::span<const double> p(pred.mv.data() + (ov.begin - lag), ov.end - ov.begin);
    const auto corr = correlation(p, r);
    if (corr && (!best_corr || *corr > *best_corr)) {
      best_corr = corr;
      best_lag = lag;
    }
  }

  const Overlap ov = overlap_at(best_lag, pred.size(), ref.size());
  if (ov.end - ov.begin < 2) {
    throw Error(Errc::short_overlap, "signals overlap by fewer than 2 samples");
  }
  LagAlignment out;
  out.lag = best_lag;
  out.correlation = best_corr.value_or(0.0);
  out.pred.sampling_rate = pred.sampling_rate;
  out.ref.sampling_rate = ref.sampling_rate;
  out.ref.mv.assign(ref.mv.begin() + static_cast<long>(ov.begin), ref.mv.begin() + static_cast<long>(ov.end));
  out.pred.mv.assign(pred.mv.begin() + static_cast<long>(ov.begin) - best_lag,
                     pred.mv.begin() + static_cast<long>(ov.end) - best_lag);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::empty_input, "median of no values");
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<long>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

DigitalSignal remove_baseline(const DigitalSignal& sig) {
  validate(sig);
  const double m = median(sig.mv);
  DigitalSignal out = sig;
  for (double& v : out.mv) v -= m;
  return out;
}

}  // namespace ecgd
