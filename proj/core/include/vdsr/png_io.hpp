#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vdsr/image.hpp"

namespace vdsr {

/// 8-bit sample to [0,1]: v / 255.
double from_u8(std::uint8_t v) noexcept;
/// [0,1] sample to 8-bit: round(v * 255) clamped to [0,255].
std::uint8_t to_u8(double v) noexcept;

/// Decodes any PNG into 8-bit RGB (grayscale is replicated, alpha dropped).
RgbImage read_png(const std::filesystem::path& path);
RgbImage decode_png(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const ImagePlane& gray);

void write_png(const std::filesystem::path& path, const RgbImage& img);
void write_png(const std::filesystem::path& path, const ImagePlane& gray);

}  // namespace vdsr
