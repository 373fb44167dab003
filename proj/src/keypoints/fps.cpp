#include "pose6d/keypoints/fps.hpp"

#include <cmath>
#include <limits>

#include "pose6d/core/error.hpp"
#include "pose6d/core/knn.hpp"

namespace pose6d {

std::vector<int> fps(const Points& points, int n, int seed_index) {
  const int total = static_cast<int>(points.rows());
  if (total == 0) {
    throw InvalidArgumentError("fps: empty point set");
  }
  if (n < 1 || n > total) {
    throw InvalidArgumentError("fps: n must be in [1, point count]");
  }
  if (seed_index < 0 || seed_index >= total) {
    throw InvalidArgumentError("fps: seed index out of range");
  }

  std::vector<int> selected;
  selected.reserve(n);
  selected.push_back(seed_index);

  // min_d2[i] = squared distance from point i to the selected set so far.
  std::vector<double> min_d2(total, std::numeric_limits<double>::infinity());
  int last = seed_index;
  for (int round = 1; round < n; ++round) {
    int best = -1;
    double best_d2 = -1.0;
    for (int i = 0; i < total; ++i) {
      const double d2 = sq_dist3(points.row(i), points.row(last));
      if (d2 < min_d2[i]) min_d2[i] = d2;
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    selected.push_back(best);
    last = best;
  }
  return selected;
}

int farthest_from_centroid(const Points& points) {
  if (points.rows() == 0) {
    throw InvalidArgumentError("farthest_from_centroid: empty point set");
  }
  const Eigen::RowVector3d centroid = points.colwise().mean();
  int best = 0;
  double best_d2 = -1.0;
  for (int i = 0; i < points.rows(); ++i) {
    const double d2 = sq_dist3(points.row(i), centroid);
    if (d2 > best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double coverage_radius(const Points& points, const Points& selected) {
  if (points.rows() == 0 || selected.rows() == 0) {
    throw InvalidArgumentError("coverage_radius: empty input");
  }
  double worst = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int j = 0; j < selected.rows(); ++j) {
      nearest = std::min(nearest, sq_dist3(points.row(i), selected.row(j)));
    }
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

namespace {

double exact_diameter(const Points& points) {
  double best = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    for (int j = i + 1; j < points.rows(); ++j) {
      best = std::max(best, sq_dist3(points.row(i), points.row(j)));
    }
  }
  return std::sqrt(best);
}

}  // namespace

double model_diameter(const Points& points) {
  if (points.rows() < 2) {
    throw InvalidArgumentError("model_diameter: need at least two points");
  }
  constexpr int kExactLimit = 4096;
  if (points.rows() <= kExactLimit) {
    return exact_diameter(points);
  }
  const std::vector<int> keep =
      fps(points, kExactLimit, farthest_from_centroid(points));
  Points reduced(kExactLimit, 3);
  for (int i = 0; i < kExactLimit; ++i) {
    reduced.row(i) = points.row(keep[i]);
  }
  return exact_diameter(reduced);
}

}  // namespace pose6d
