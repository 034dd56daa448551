#pragma once

#include <string_view>
#include <vector>

#include "ecgd/grid.hpp"
#include "ecgd/raster.hpp"

namespace ecgd {

struct OtsuResult {
  int threshold = 0;
  bool degenerate = false;  // only one distinct intensity present
};

/// Threshold minimising weighted intra-class variance, class 0 = {<= t}.
/// Ties go to the smallest t. Comparisons are exact (integer arithmetic).
OtsuResult otsu_threshold(const GrayImage& img);
OtsuResult otsu_threshold(const std::vector<std::uint64_t>& histogram);

enum class HedgeStop { grid_gone, floor_reached, no_grid_initially };
std::string_view to_string(HedgeStop stop) noexcept;

struct HedgingParams {
  double step = 0.95;   // multiplicative decrement per iteration
  double floor = 0.6;
  HoughParams hough{};
};

struct HedgingTrace {
  int otsu_threshold = 0;
  bool otsu_degenerate = false;
  std::vector<double> factors;
  double final_factor = 1.0;
  HedgeStop stop_reason = HedgeStop::no_grid_initially;
};

struct HedgedMask {
  BinaryMask mask;
  HedgingTrace trace;
};

/// Otsu binarization (signal iff intensity <= threshold x factor) with the
/// factor scaled down until grid lines vanish from the mask or the factor
/// reaches the floor.
HedgedMask adaptive_binarize(const GrayImage& img, const HedgingParams& params = {});

/// Drops 4-connected signal components smaller than `min_area` pixels.
BinaryMask denoise(const BinaryMask& mask, std::size_t min_area = 4);

}  // namespace ecgd
