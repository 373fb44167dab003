#include "pose6d/core/subsample.hpp"

#include <numeric>

#include "pose6d/core/rng.hpp"

namespace pose6d {

std::vector<int> subsample_indices(int total, int n, std::uint64_t seed) {
  if (n > total) throw InvalidArgumentError("subsample: n exceeds point count");
  if (n < 0) throw InvalidArgumentError("subsample: negative n");
  std::vector<int> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(total - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

PointCloud random_subsample(const PointCloud& cloud, int n, std::uint64_t seed) {
  const auto idx = subsample_indices(cloud.size(), n, seed);
  PointCloud out;
  out.points.resize(n, 3);
  if (cloud.has_colors()) out.colors.resize(n, 3);
  if (cloud.has_normals()) out.normals.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    out.points.row(i) = cloud.points.row(idx[i]);
    if (cloud.has_colors()) out.colors.row(i) = cloud.colors.row(idx[i]);
    if (cloud.has_normals()) out.normals.row(i) = cloud.normals.row(idx[i]);
  }
  return out;
}

}  // namespace pose6d
