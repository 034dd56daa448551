#include <doctest.h>

#include "ecgd/raster.hpp"
#include "ecgd/rng.hpp"

using namespace ecgd;

TEST_CASE("grayscale of white and black") {
  const GrayImage white = to_grayscale(RasterImage(4, 3, Rgb{255, 255, 255}));
  for (auto v : white.pixels()) CHECK(v == 255);
  const GrayImage black = to_grayscale(RasterImage(4, 3, Rgb{0, 0, 0}));
  for (auto v : black.pixels()) CHECK(v == 0);
  CHECK(white.width() == 4);
  CHECK(white.height() == 3);
}

TEST_CASE("pure red maps to 76") {
  // round(0.299 * 255) = round(76.245)
  CHECK(luma(Rgb{255, 0, 0}) == 76);
  CHECK(luma(Rgb{0, 255, 0}) == 150);  // round(149.685)
  CHECK(luma(Rgb{0, 0, 255}) == 29);   // round(29.07)
}

TEST_CASE("equal channels pass through unchanged") {
  for (int v = 0; v < 256; ++v) {
    const auto c = static_cast<std::uint8_t>(v);
    CHECK(luma(Rgb{c, c, c}) == c);
  }
}

TEST_CASE("fixed threshold binarization") {
  CHECK(binarize_fixed(GrayImage(3, 2, 0), 128).count() == 6);
  CHECK(binarize_fixed(GrayImage(3, 2, 255), 128).count() == 0);

  const GrayImage img(3, 1, std::vector<std::uint8_t>{20, 150, 250});
  const BinaryMask m = binarize_fixed(img, 100);
  CHECK(m.signal(0, 0));
  CHECK_FALSE(m.signal(1, 0));
  CHECK_FALSE(m.signal(2, 0));

  CHECK_THROWS_AS(binarize_fixed(img, -1.0), Error);
  CHECK_THROWS_AS(binarize_fixed(img, 256.0), Error);
}

TEST_CASE("raising the threshold never removes signal") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> px(64);
    for (auto& v : px) v = static_cast<std::uint8_t>(rng.integer(0, 255));
    const GrayImage img(8, 8, px);
    const double lo = rng.uniform(0, 255);
    const double hi = rng.uniform(lo, 255);
    const BinaryMask a = binarize_fixed(img, lo);
    const BinaryMask b = binarize_fixed(img, hi);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.pixels()[i] == Mark::signal) CHECK(b.pixels()[i] == Mark::signal);
    }
  }
}

TEST_CASE("pixel grid rejects inconsistent shapes") {
  CHECK_THROWS_AS(GrayImage(0, 3), Error);
  CHECK_THROWS_AS(GrayImage(2, 2, std::vector<std::uint8_t>(3)), Error);
}

TEST_CASE("black and white detection") {
  RasterImage img(2, 1, Rgb{255, 255, 255});
  img.at(0, 0) = Rgb{0, 0, 0};
  REQUIRE(is_black_white(img));
  const BinaryMask m = black_white_to_mask(img);
  CHECK(m.signal(0, 0));
  CHECK_FALSE(m.signal(1, 0));
  img.at(1, 0) = Rgb{255, 0, 0};
  CHECK_FALSE(is_black_white(img));
  CHECK_THROWS_AS(black_white_to_mask(img), Error);
}
