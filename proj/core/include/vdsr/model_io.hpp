#pragma once

#include <filesystem>
#include <iosfwd>

#include "vdsr/network.hpp"

namespace vdsr {

/// Model container, all integers and floats little-endian:
///
///   magic "VDSRNET\0" (8 bytes), u32 version = 1,
///   u32 depth, u32 filters, u32 kernel, u32 activation (1 = ReLU),
///   u32 estimator (0 = MSE, 1 = Var-norm), f64 stability R,
///   u32 scale count S, S x u32 scales,
///   u32 provenance length P, P bytes provenance text,
///   then for each layer in order: weights (out*in*k*k f64) and biases (out f64).
///
/// Layer shapes are implied by depth, filters and kernel.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_model(std::ostream& os, const NetworkModel& model);
NetworkModel read_model(std::istream& is);

/// Whole-file atomic save (temp file then rename).
void save_model(const std::filesystem::path& path, const NetworkModel& model);
NetworkModel load_model(const std::filesystem::path& path);

}  // namespace vdsr
