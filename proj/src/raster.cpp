#include "ecgd/raster.hpp"

#include <algorithm>

namespace ecgd {

std::size_t BinaryMask::count() const noexcept {
  auto px = pixels();
  return static_cast<std::size_t>(std::count(px.begin(), px.end(), Mark::signal));
}

std::uint8_t luma(Rgb px) noexcept {
  // 0.299 R + 0.587 G + 0.114 B in thousandths; max is 255000 so no clamp is needed.
  unsigned weighted = 299u * px.r + 587u * px.g + 114u * px.b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

GrayImage to_grayscale(const RasterImage& img) {
  GrayImage out(img.width(), img.height());
  std::ranges::transform(img.pixels(), out.pixels().begin(), luma);
  return out;
}

BinaryMask binarize_fixed(const GrayImage& img, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 255.0)) {
    throw Error(Errc::invalid_argument, "threshold must lie in [0, 255]");
  }
  BinaryMask out(img.width(), img.height());
  std::ranges::transform(img.pixels(), out.pixels().begin(), [threshold](std::uint8_t v) {
    return static_cast<double>(v) < threshold ? Mark::signal : Mark::background;
  });
  return out;
}

GrayImage mask_to_gray(const BinaryMask& mask) {
  GrayImage out(mask.width(), mask.height());
  std::ranges::transform(mask.pixels(), out.pixels().begin(), [](Mark m) -> std::uint8_t {
    return m == Mark::signal ? 0 : 255;
  });
  return out;
}

bool is_black_white(const RasterImage& img) noexcept {
  return std::ranges::all_of(img.pixels(), [](Rgb px) {
    return px == Rgb{0, 0, 0} || px == Rgb{255, 255, 255};
  });
}

BinaryMask black_white_to_mask(const RasterImage& img) {
  if (!is_black_white(img)) {
    throw Error(Errc::invalid_argument, "image is not strictly black and white");
  }
  BinaryMask out(img.width(), img.height());
  std::ranges::transform(img.pixels(), out.pixels().begin(), [](Rgb px) {
    return px.r == 0 ? Mark::signal : Mark::background;
  });
  return out;
}

}  // namespace ecgd
