#pragma once

#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Greedy farthest point sampling. Starting from seed_index, each step adds
/// the point whose minimum distance to the already-selected set is largest;
/// ties go to the lowest index. Returns the n selected indices in pick order.
std::vector<int> fps(const Points& points, int n, int seed_index);

/// Index of the point farthest from the centroid, the deterministic default
/// FPS seed (ties to the lowest index).
int farthest_from_centroid(const Points& points);

/// Max over `points` of the distance to its nearest point in `selected`.
double coverage_radius(const Points& points, const Points& selected);

/// Max pairwise distance. Exact for M <= 4096; above that the set is first
/// reduced to an FPS subset of 4096 points and the maximum is taken over the
/// subset (a documented approximation that preserves extremal points well).
double model_diameter(const Points& points);

}  // namespace pose6d
