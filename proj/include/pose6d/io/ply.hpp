#pragma once

#include <string>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Parse an ASCII PLY held in memory. The vertex element must carry x, y, z;
/// nx/ny/nz and red/green/blue are picked up when declared (integer-typed
/// colors are scaled by 1/255). Binary PLY, non-vertex elements, and any
/// malformed content raise ParseError carrying the 1-based line number.
PointCloud read_ply(const std::string& text);

/// Serialize with 9-significant-digit decimals, so any value that survives
/// that rounding round-trips exactly: read_ply(write_ply(c)) reproduces c
/// up to the documented precision, and write_ply of the result is
/// byte-identical.
std::string write_ply(const PointCloud& cloud);

PointCloud load_ply(const std::string& path);
void save_ply(const PointCloud& cloud, const std::string& path);

}  // namespace pose6d
