#pragma once

#include <cstdint>
#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Indices of n points drawn without replacement via a partial Fisher-Yates
/// shuffle of [0, total) driven by Rng(seed). Deterministic for a fixed seed.
std::vector<int> subsample_indices(int total, int n, std::uint64_t seed);

/// Draw n points (with their colors/normals) without replacement.
/// Throws for n > cloud.size().
PointCloud random_subsample(const PointCloud& cloud, int n, std::uint64_t seed);

}  // namespace pose6d
