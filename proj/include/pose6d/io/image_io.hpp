#pragma once

#include <string>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Binary PPM (P6, maxval 255). Channels in [0,1] quantize to the nearest
/// 8-bit level; read scales back by 1/255, so write∘read is byte-exact.
std::string write_ppm(const ImagePlane& red, const ImagePlane& green,
                      const ImagePlane& blue);
void read_ppm(const std::string& bytes, ImagePlane& red, ImagePlane& green,
              ImagePlane& blue);

/// Binary PGM (P5, maxval 255) over small non-negative ids (<= 255).
std::string write_pgm(const IndexMatrix& values);
IndexMatrix read_pgm(const std::string& bytes);

/// Raw depth: magic "P6DD1", little-endian uint32 width and height, then
/// row-major little-endian float32 meters (0 = invalid). Byte-exact round
/// trips; depth passing through this format is quantized to float32.
std::string write_depth_raw(const ImagePlane& depth);
ImagePlane read_depth_raw(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace pose6d
