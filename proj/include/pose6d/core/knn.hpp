#pragma once

#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Squared distance accumulated axis by axis. Both the brute-force and the
/// kd-tree paths use this exact expression so their results are bit-identical.
inline double sq_dist3(const Eigen::RowVector3d& a, const Eigen::RowVector3d& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/// Exact k-nearest-neighbor kd-tree over 3D points. Results are ordered by
/// ascending squared distance with ties broken by lowest reference index,
/// matching the brute-force scan exactly.
class KdTree3 {
 public:
  explicit KdTree3(const Points& reference);

  /// Indices of the k nearest reference points (k <= size()).
  void knn(const Eigen::RowVector3d& query, int k, std::vector<int>& out) const;

  int nearest(const Eigen::RowVector3d& query) const;

  int size() const { return static_cast<int>(points_.rows()); }

 private:
  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;
    int left = -1, right = -1;
    int begin = 0, end = 0;  // leaf range into order_
  };

  int build(int begin, int end);

  struct Best {
    double d2;
    int idx;
    bool operator<(const Best& o) const {
      return d2 < o.d2 || (d2 == o.d2 && idx < o.idx);
    }
  };
  void search(int node, const Eigen::RowVector3d& query, int k, std::vector<Best>& heap) const;

  Points points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Exhaustive exact kNN, the oracle-grade reference path.
IndexMatrix knn_brute_force(const Points& query, const Points& reference, int k);

/// Exact kNN of each query row among the reference rows; ascending distance,
/// ties to the lowest index. Uses a kd-tree for large references and the
/// brute-force scan for small ones; both produce identical output.
/// Throws for k > N or an empty reference.
IndexMatrix knn(const Points& query, const Points& reference, int k);

}  // namespace pose6d
