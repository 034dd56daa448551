#pragma once

#include <vector>

#include "ecgd/raster.hpp"

namespace ecgd {

struct DetectedLine {
  double position = 0.0;  // row for horizontals, column for verticals
  double score = 0.0;     // peak accumulator votes
};

struct LineSet {
  std::vector<DetectedLine> horizontals;
  std::vector<DetectedLine> verticals;

  std::size_t total() const noexcept { return horizontals.size() + verticals.size(); }
};

/// Pixels per large grid square along each axis.
struct GridGeometry {
  double width_pixels = 0.0;
  double height_pixels = 0.0;
  bool square_assumed = false;
  // Gaps fell into a small/large cluster pair and the large one was used.
  bool large_from_bimodal = false;

  bool valid() const noexcept { return width_pixels > 0.0 && height_pixels > 0.0; }
};

struct HoughParams {
  int angle_window_deg = 2;
  double vote_fraction = 0.5;
  double merge_radius = 4.0;
};

/// Middle intensity cluster of a 1-D k-means (k = 3, seeds 0/128/255) over
/// the grayscale histogram, before any morphology.
BinaryMask cluster_mid_intensity(const GrayImage& gray);

/// Union of 1x3 and 3x1 openings, then a 3x3 closing.
BinaryMask refine_grid_mask(const BinaryMask& raw);

/// Grid-line pixels of a color scan: cluster_mid_intensity + refine_grid_mask.
/// Throws Errc::empty_grid on a uniform image.
BinaryMask isolate_grid_pixels(const RasterImage& img);

LineSet detect_lines(const BinaryMask& grid_mask, const HoughParams& params = {});

/// Median consecutive gap of each line family. Throws Errc::grid_undetected
/// with fewer than two verticals.
GridGeometry estimate_grid(const LineSet& lines);

/// True iff detect_lines finds at least three lines in total.
bool grid_detectable(const BinaryMask& mask, const HoughParams& params = {});

/// Full chain from a color scan.
GridGeometry detect_grid(const RasterImage& img, LineSet* lines_out = nullptr);

}  // namespace ecgd
