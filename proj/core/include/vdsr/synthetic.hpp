#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vdsr/image.hpp"

namespace vdsr {

/// Deterministic textured RGB scene: smooth colour gradient, oriented
/// sinusoidal gratings and opaque rectangles and discs.
RgbImage synthetic_image(std::size_t height, std::size_t width, std::uint64_t seed);

/// `count` scenes with seeds derived from `seed`.
std::vector<RgbImage> synthetic_images(std::size_t count, std::size_t height, std::size_t width,
                                       std::uint64_t seed);

}  // namespace vdsr
