#include <doctest.h>

#include <variant>

#include "ecgd/image_io.hpp"
#include "ecgd/rng.hpp"

using namespace ecgd;

namespace {

RasterImage random_image(Rng& rng, std::size_t w, std::size_t h) {
  RasterImage img(w, h);
  for (auto& px : img.pixels()) {
    px = Rgb{static_cast<std::uint8_t>(rng.integer(0, 255)), static_cast<std::uint8_t>(rng.integer(0, 255)),
             static_cast<std::uint8_t>(rng.integer(0, 255))};
  }
  return img;
}

// Hand-built 8-bit paletted BMP, 3x2, bottom-up.
Bytes paletted_bmp() {
  Bytes b = {'B', 'M', 0, 0, 0, 0, 0, 0, 0, 0, 14 + 40 + 8, 0, 0, 0};
  auto le32 = [&b](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  le32(40);
  le32(3);
  le32(2);
  b.push_back(1);
  b.push_back(0);
  b.push_back(8);
  b.push_back(0);
  le32(0);
  le32(0);
  le32(0);
  le32(0);
  le32(2);  // colors used
  le32(0);
  b.insert(b.end(), {0, 0, 0, 0, 255, 255, 255, 0});  // palette: black, white (BGRx)
  b.insert(b.end(), {0, 1, 0, 0});                    // bottom row: B W B + pad
  b.insert(b.end(), {1, 1, 0, 0});                    // top row: W W B + pad
  return b;
}

}  // namespace

TEST_CASE("black and white PNG decodes as a mask") {
  RasterImage img(2, 1, Rgb{255, 255, 255});
  img.at(0, 0) = Rgb{0, 0, 0};
  const auto decoded = decode_any(encode_png(img));
  REQUIRE(std::holds_alternative<BinaryMask>(decoded));
  const auto& mask = std::get<BinaryMask>(decoded);
  CHECK(mask.signal(0, 0));
  CHECK_FALSE(mask.signal(1, 0));
}

TEST_CASE("PNG and BMP round trips are pixel exact") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = static_cast<std::size_t>(rng.integer(1, 37));
    const auto h = static_cast<std::size_t>(rng.integer(1, 23));
    const RasterImage img = random_image(rng, w, h);
    CHECK(decode_image(encode_png(img)) == img);
    CHECK(decode_image(encode_bmp(img)) == img);
  }
  GrayImage gray(5, 4);
  for (std::size_t i = 0; i < gray.size(); ++i) gray.pixels()[i] = static_cast<std::uint8_t>(i * 13);
  const RasterImage back = decode_image(encode_png(gray));
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const auto v = gray.pixels()[i];
    CHECK(back.pixels()[i] == Rgb{v, v, v});
  }
}

TEST_CASE("mask PNG round trip") {
  BinaryMask mask(7, 3);
  mask.set(1, 1, true);
  mask.set(6, 2, true);
  CHECK(decode_mask(encode_png(mask)) == mask);
}

TEST_CASE("paletted BMP") {
  const RasterImage img = decode_image(paletted_bmp());
  REQUIRE(img.width() == 3);
  REQUIRE(img.height() == 2);
  const Rgb black{0, 0, 0};
  const Rgb white{255, 255, 255};
  CHECK(img.at(0, 0) == white);
  CHECK(img.at(2, 0) == black);
  CHECK(img.at(0, 1) == black);
  CHECK(img.at(1, 1) == white);
}

TEST_CASE("truncated files raise decode errors") {
  const Bytes png = encode_png(RasterImage(8, 8, Rgb{10, 20, 30}));
  for (std::size_t keep : {std::size_t{4}, std::size_t{20}, png.size() / 2, png.size() - 13}) {
    const Bytes cut(png.begin(), png.begin() + static_cast<long>(keep));
    try {
      (void)decode_image(cut);
      FAIL("decode succeeded on " << keep << " bytes");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::decode);
    }
  }
  const Bytes bmp = encode_bmp(RasterImage(8, 8, Rgb{10, 20, 30}));
  const Bytes cut(bmp.begin(), bmp.end() - 10);
  try {
    (void)decode_image(cut);
    FAIL("decode succeeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::decode);
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
}

TEST_CASE("unsupported formats are rejected") {
  Bytes png = encode_png(RasterImage(2, 2, Rgb{1, 2, 3}));
  png[24] = 16;  // claim 16-bit samples in IHDR
  try {
    (void)decode_image(png);
    FAIL("16-bit PNG accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_format);
  }
  Bytes bmp = encode_bmp(RasterImage(2, 2, Rgb{1, 2, 3}));
  bmp[28] = 32;
  try {
    (void)decode_image(bmp);
    FAIL("32-bit BMP accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_format);
  }
  const Bytes garbage = {'G', 'I', 'F', '8', '9', 'a', 0, 0, 0, 0};
  CHECK_THROWS_AS(decode_image(garbage), Error);
}
