#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecgd/error.hpp"

namespace ecgd {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major pixel grid with fixed dimensions. Both dimensions are at least 1.
template <typename T>
class PixelGrid {
 public:
  using value_type = T;

  PixelGrid() = default;
  PixelGrid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), pixels_(checked_area(width, height), fill) {}
  PixelGrid(std::size_t width, std::size_t height, std::vector<T> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_area(width, height)) {
      throw Error(Errc::invalid_argument, "pixel count does not match width x height");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  const T& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  T& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

  std::span<const T> pixels() const noexcept { return pixels_; }
  std::span<T> pixels() noexcept { return pixels_; }

  template <typename U>
  bool same_shape(const PixelGrid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  static std::size_t checked_area(std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
      throw Error(Errc::invalid_argument, "image dimensions must be at least 1x1");
    }
    return width * height;
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> pixels_;
};

using RasterImage = PixelGrid<Rgb>;
using GrayImage = PixelGrid<std::uint8_t>;

/// Pixel classes of a binary mask. Files store signal as black.
enum class Mark : std::uint8_t { background = 0, signal = 1 };

class BinaryMask : public PixelGrid<Mark> {
 public:
  using PixelGrid<Mark>::PixelGrid;

  bool signal(std::size_t x, std::size_t y) const { return at(x, y) == Mark::signal; }
  void set(std::size_t x, std::size_t y, bool on) {
    at(x, y) = on ? Mark::signal : Mark::background;
  }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
};

/// ITU-R 601 luma, rounded half up.
std::uint8_t luma(Rgb px) noexcept;

GrayImage to_grayscale(const RasterImage& img);

/// Signal iff intensity < threshold. Threshold must lie in [0, 255].
BinaryMask binarize_fixed(const GrayImage& img, double threshold);

/// Mask rendered as an 8-bit image: signal black, background white.
GrayImage mask_to_gray(const BinaryMask& mask);

/// Returns the mask if every pixel is pure black or pure white.
bool is_black_white(const RasterImage& img) noexcept;
BinaryMask black_white_to_mask(const RasterImage& img);

}  // namespace ecgd
