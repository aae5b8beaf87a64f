#pragma once

#include <string>

#include "edgevo/image.hpp"

namespace edgevo {

/// Binary 8-bit PGM (P5); intensities are rounded and clamped to [0, 255].
void write_pgm(const std::string& path, const Image& image);
/// Reads P5 or P2 with maxval <= 255.
Image read_pgm(const std::string& path);

/// Depth binary layout, little-endian:
///   magic "EVDM" | uint32 version (1) | uint32 width | uint32 height |
///   float64 mean[w*h] | float64 variance[w*h]   (row-major, NaN where undefined)
void write_depth(const std::string& path, const InverseDepthMap& depth);
InverseDepthMap read_depth(const std::string& path);

}  // namespace edgevo
