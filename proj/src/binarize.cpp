#include "ecgd/binarize.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>

namespace ecgd {
namespace {

using boost::multiprecision::cpp_int;

// Otsu puts its threshold level in the dark class, so the scaled threshold
// is inclusive as well.
BinaryMask at_or_below(const GrayImage& img, double limit) {
  BinaryMask mask(img.width(), img.height());
  auto out = mask.pixels();
  auto in = img.pixels();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] <= limit ? Mark::signal : Mark::background;
  return mask;
}

}  // namespace

std::string_view to_string(HedgeStop stop) noexcept {
  switch (stop) {
    case HedgeStop::grid_gone: return "grid-gone";
    case HedgeStop::floor_reached: return "floor-reached";
    case HedgeStop::no_grid_initially: return "no-grid-initially";
  }
  return "unknown";
}

OtsuResult otsu_threshold(const std::vector<std::uint64_t>& histogram) {
  if (histogram.size() != 256) throw Error(Errc::invalid_argument, "histogram must have 256 bins");
  std::uint64_t total = 0;
  std::uint64_t total_sum = 0;
  int distinct = 0;
  int only_level = 0;
  for (int v = 0; v < 256; ++v) {
    total += histogram[v];
    total_sum += histogram[v] * static_cast<std::uint64_t>(v);
    if (histogram[v] > 0) {
      ++distinct;
      only_level = v;
    }
  }
  if (total == 0) throw Error(Errc::empty_input, "empty histogram");
  if (distinct == 1) return {only_level, true};

  // Minimising w0*var0 + w1*var1 is equivalent to maximising
  // (S0*N - S*N0)^2 / (N0*N1); the ratios are compared by cross-multiplying
  // so equal partitions tie exactly.
  const cpp_int n = total;
  const cpp_int s = total_sum;
  cpp_int best_num = 0;
  cpp_int best_den = 1;
  int best_t = 0;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += histogram[t];
    s0 += histogram[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total - n0;
    cpp_int num = 0;
    cpp_int den = 1;
    if (n0 > 0 && n1 > 0) {
      const cpp_int d = cpp_int(s0) * n - s * cpp_int(n0);
      num = d * d;
      den = cpp_int(n0) * cpp_int(n1);
    }
    if (t == 0 || num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }
  return {best_t, false};
}

OtsuResult otsu_threshold(const GrayImage& img) {
  std::vector<std::uint64_t> hist(256, 0);
  for (std::uint8_t v : img.pixels()) ++hist[v];
  return otsu_threshold(hist);
}

HedgedMask adaptive_binarize(const GrayImage& img, const HedgingParams& params) {
  if (!(params.floor > 0.0 && params.floor <= 1.0) || !(params.step > 0.0 && params.step < 1.0)) {
    throw Error(Errc::invalid_argument, "hedging floor must be in (0, 1] and step in (0, 1)");
  }
  const OtsuResult otsu = otsu_threshold(img);
  HedgingTrace trace;
  trace.otsu_threshold = otsu.threshold;
  trace.otsu_degenerate = otsu.degenerate;

  double factor = 1.0;
  trace.factors.push_back(factor);
  BinaryMask mask = at_or_below(img, otsu.threshold * factor);
  bool detectable = grid_detectable(mask, params.hough);
  if (!detectable) {
    trace.stop_reason = HedgeStop::no_grid_initially;
  } else {
    while (detectable && factor > params.floor) {
      factor = std::max(factor * params.step, params.floor);
      trace.factors.push_back(factor);
      mask = at_or_below(img, otsu.threshold * factor);
      detectable = grid_detectable(mask, params.hough);
    }
    trace.stop_reason = detectable ? HedgeStop::floor_reached : HedgeStop::grid_gone;
  }
  trace.final_factor = factor;
  return {std::move(mask), std::move(trace)};
}

BinaryMask denoise(const BinaryMask& mask, std::size_t min_area) {
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  BinaryMask out = mask;
  std::vector<std::uint8_t> seen(w * h, 0);
  std::vector<std::size_t> component;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < w * h; ++start) {
    if (seen[start] != 0 || mask.pixels()[start] != Mark::signal) continue;
    component.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t at = stack.back();
      stack.pop_back();
      component.push_back(at);
      const std::size_t x = at % w;
      const std::size_t y = at / w;
      auto visit = [&](std::size_t nx, std::size_t ny) {
        const std::size_t idx = ny * w + nx;
        if (seen[idx] == 0 && mask.pixels()[idx] == Mark::signal) {
          seen[idx] = 1;
          stack.push_back(idx);
        }
      };
      if (x > 0) visit(x - 1, y);
      if (x + 1 < w) visit(x + 1, y);
      if (y > 0) visit(x, y - 1);
      if (y + 1 < h) visit(x, y + 1);
    }
    if (component.size() < min_area) {
      for (std::size_t idx : component) out.pixels()[idx] = Mark::background;
    }
  }
  return out;
}

}  // namespace ecgd
