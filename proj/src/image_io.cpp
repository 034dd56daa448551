#include "ecgd/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <string>

namespace ecgd {
namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
  return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) | (std::uint32_t{b[at + 2]} << 16) |
         (std::uint32_t{b[at + 3]} << 24);
}

std::uint16_t le16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

[[noreturn]] void decode_error(const std::string& what, std::size_t offset) {
  throw Error(Errc::decode, what + " at byte offset " + std::to_string(offset));
}

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= kPngSignature.size() &&
         std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin());
}

bool is_bmp(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M';
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  // Signature (8) + IHDR length/type (8) + 13 bytes of header data.
  if (bytes.size() < 8 + 8 + 13) decode_error("truncated PNG header", bytes.size());
  if (std::memcmp(bytes.data() + 12, "IHDR", 4) != 0) decode_error("missing IHDR chunk", 12);
  const std::uint8_t bit_depth = bytes[24];
  const std::uint8_t color_type = bytes[25];
  if (bit_depth != 8) {
    throw Error(Errc::unsupported_format, "PNG bit depth " + std::to_string(bit_depth) + " (only 8-bit)");
  }
  if (color_type != 0 && color_type != 2) {
    throw Error(Errc::unsupported_format,
                "PNG color type " + std::to_string(color_type) + " (only gray and RGB)");
  }

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    std::string msg = image.message;
    png_image_free(&image);
    decode_error("PNG: " + msg, 0);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    decode_error("PNG has zero dimension", 16);
  }
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    std::string msg = image.message;
    png_image_free(&image);
    decode_error("PNG: " + msg, 0);
  }
  RasterImage out(image.width, image.height);
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return out;
}

RasterImage decode_bmp(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 14 + 40) decode_error("truncated BMP header", bytes.size());
  const std::uint32_t pixel_offset = le32(bytes, 10);
  const std::uint32_t dib_size = le32(bytes, 14);
  if (dib_size < 40) {
    throw Error(Errc::unsupported_format, "BMP info header of " + std::to_string(dib_size) + " bytes");
  }
  const auto width = static_cast<std::int32_t>(le32(bytes, 18));
  const auto raw_height = static_cast<std::int32_t>(le32(bytes, 22));
  const std::uint16_t bpp = le16(bytes, 28);
  const std::uint32_t compression = le32(bytes, 30);
  const std::uint32_t colors_used = le32(bytes, 46);

  if (compression != 0) {
    throw Error(Errc::unsupported_format, "compressed BMP (method " + std::to_string(compression) + ")");
  }
  if (bpp != 1 && bpp != 8 && bpp != 24) {
    throw Error(Errc::unsupported_format, "BMP bit depth " + std::to_string(bpp));
  }
  if (width <= 0 || raw_height == 0) decode_error("BMP has non-positive dimension", 18);
  const bool top_down = raw_height < 0;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(top_down ? -static_cast<std::int64_t>(raw_height) : raw_height);

  std::vector<Rgb> palette;
  if (bpp <= 8) {
    const std::size_t entries = colors_used != 0 ? colors_used : (std::size_t{1} << bpp);
    if (entries > (std::size_t{1} << bpp)) decode_error("BMP palette larger than bit depth allows", 46);
    const std::size_t palette_at = 14 + dib_size;
    if (palette_at + 4 * entries > bytes.size()) decode_error("truncated BMP palette", bytes.size());
    palette.reserve(entries);
    for (std::size_t i = 0; i < entries; ++i) {
      const std::size_t at = palette_at + 4 * i;
      palette.push_back(Rgb{bytes[at + 2], bytes[at + 1], bytes[at]});
    }
  }

  const std::size_t stride = ((static_cast<std::size_t>(bpp) * w + 31) / 32) * 4;
  if (pixel_offset > bytes.size() || stride * h > bytes.size() - pixel_offset) {
    decode_error("truncated BMP pixel data", bytes.size());
  }

  RasterImage out(w, h);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = top_down ? row : h - 1 - row;
    const std::size_t base = pixel_offset + row * stride;
    for (std::size_t x = 0; x < w; ++x) {
      Rgb px;
      if (bpp == 24) {
        const std::size_t at = base + 3 * x;
        px = Rgb{bytes[at + 2], bytes[at + 1], bytes[at]};
      } else {
        std::size_t index = 0;
        if (bpp == 8) {
          index = bytes[base + x];
        } else {
          index = (bytes[base + x / 8] >> (7 - x % 8)) & 1u;
        }
        if (index >= palette.size()) decode_error("BMP palette index out of range", base + x);
        px = palette[index];
      }
      out.at(x, y) = px;
    }
  }
  return out;
}

Bytes encode_png_raw(const std::uint8_t* data, std::size_t width, std::size_t height, png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr) == 0) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::io, "PNG encode: " + msg);
  }
  Bytes out(size);
  if (png_image_write_to_memory(&image, out.data(), &size, 0, data, 0, nullptr) == 0) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::io, "PNG encode: " + msg);
  }
  out.resize(size);
  return out;
}

void put_le32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_le16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_bmp(bytes)) return decode_bmp(bytes);
  if (bytes.size() < 8) decode_error("file too short to identify", bytes.size());
  throw Error(Errc::unsupported_format, "unrecognised image signature");
}

std::variant<RasterImage, BinaryMask> decode_any(std::span<const std::uint8_t> bytes) {
  RasterImage img = decode_image(bytes);
  if (is_black_white(img)) return black_white_to_mask(img);
  return img;
}

BinaryMask decode_mask(std::span<const std::uint8_t> bytes) {
  RasterImage img = decode_image(bytes);
  if (is_black_white(img)) return black_white_to_mask(img);
  return binarize_fixed(to_grayscale(img), 128.0);
}

Bytes encode_png(const RasterImage& img) {
  std::vector<std::uint8_t> data;
  data.reserve(img.size() * 3);
  for (Rgb px : img.pixels()) {
    data.push_back(px.r);
    data.push_back(px.g);
    data.push_back(px.b);
  }
  return encode_png_raw(data.data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

Bytes encode_png(const GrayImage& img) {
  return encode_png_raw(img.pixels().data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

Bytes encode_png(const BinaryMask& mask) { return encode_png(mask_to_gray(mask)); }

Bytes encode_bmp(const RasterImage& img) {
  const std::size_t stride = ((24 * img.width() + 31) / 32) * 4;
  const std::size_t data_size = stride * img.height();
  Bytes out;
  out.reserve(54 + data_size);
  out.push_back('B');
  out.push_back('M');
  put_le32(out, static_cast<std::uint32_t>(54 + data_size));
  put_le32(out, 0);
  put_le32(out, 54);
  put_le32(out, 40);
  put_le32(out, static_cast<std::uint32_t>(img.width()));
  put_le32(out, static_cast<std::uint32_t>(img.height()));
  put_le16(out, 1);
  put_le16(out, 24);
  put_le32(out, 0);
  put_le32(out, static_cast<std::uint32_t>(data_size));
  put_le32(out, 2835);  // 72 dpi
  put_le32(out, 2835);
  put_le32(out, 0);
  put_le32(out, 0);
  for (std::size_t row = 0; row < img.height(); ++row) {
    const std::size_t y = img.height() - 1 - row;
    for (std::size_t x = 0; x < img.width(); ++x) {
      const Rgb px = img.at(x, y);
      out.push_back(px.b);
      out.push_back(px.g);
      out.push_back(px.r);
    }
    out.resize(out.size() + (stride - 3 * img.width()), 0);
  }
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "short write to " + path.string());
}

RasterImage load_image(const std::filesystem::path& path) { return decode_image(read_file(path)); }

BinaryMask load_mask(const std::filesystem::path& path) { return decode_mask(read_file(path)); }

}  // namespace ecgd
