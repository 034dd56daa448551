#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "ecgd/raster.hpp"

namespace ecgd {

using Bytes = std::vector<std::uint8_t>;

/// Decodes PNG (8-bit gray or RGB) or BMP (uncompressed 1, 8 or 24 bit).
/// The format is chosen from the file signature.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

/// Like decode_image, but an image made only of pure black and pure white
/// pixels comes back as a mask (black = signal).
std::variant<RasterImage, BinaryMask> decode_any(std::span<const std::uint8_t> bytes);

/// Decodes and binarizes at mid-gray when the file is not strictly black/white.
BinaryMask decode_mask(std::span<const std::uint8_t> bytes);

Bytes encode_png(const RasterImage& img);
Bytes encode_png(const GrayImage& img);
Bytes encode_png(const BinaryMask& mask);
Bytes encode_bmp(const RasterImage& img);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

RasterImage load_image(const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

}  // namespace ecgd
