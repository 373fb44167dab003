#include "pose6d/core/knn.hpp"

#include <algorithm>
#include <numeric>

namespace pose6d {

namespace {
constexpr int kLeafSize = 8;
constexpr int kBruteForceLimit = 256;  // below this a linear scan wins
}  // namespace

KdTree3::KdTree3(const Points& reference) : points_(reference) {
  if (points_.rows() == 0) throw InvalidArgumentError("kd-tree: empty reference set");
  if (!points_.allFinite()) throw InvalidArgumentError("kd-tree: non-finite coordinates");
  order_.resize(points_.rows());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * points_.rows() / kLeafSize + 4);
  root_ = build(0, static_cast<int>(order_.size()));
}

int KdTree3::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }

  // Split on the axis of widest extent.
  Eigen::RowVector3d lo = points_.row(order_[begin]);
  Eigen::RowVector3d hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_.row(order_[i]));
    hi = hi.cwiseMax(points_.row(order_[i]));
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = points_(a, axis), cb = points_(b, axis);
                     return ca < cb || (ca == cb && a < b);
                   });

  nodes_[id].axis = axis;
  nodes_[id].split = points_(order_[mid], axis);
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree3::search(int node_id, const Eigen::RowVector3d& query, int k,
                     std::vector<Best>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const Best cand{sq_dist3(query, points_.row(idx)), idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }

  const double diff = query[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, query, k, heap);
  // The far side may still hold an equal-distance lower-index point, so
  // recurse on <= rather than <.
  if (static_cast<int>(heap.size()) < k || diff * diff <= heap.front().d2)
    search(far, query, k, heap);
}

void KdTree3::knn(const Eigen::RowVector3d& query, int k, std::vector<int>& out) const {
  if (k > size()) throw InvalidArgumentError("knn: k exceeds reference size");
  std::vector<Best> heap;
  heap.reserve(k);
  search(root_, query, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  out.resize(k);
  for (int i = 0; i < k; ++i) out[i] = heap[i].idx;
}

int KdTree3::nearest(const Eigen::RowVector3d& query) const {
  std::vector<int> out;
  knn(query, 1, out);
  return out[0];
}

IndexMatrix knn_brute_force(const Points& query, const Points& reference, int k) {
  const int m = static_cast<int>(query.rows());
  const int n = static_cast<int>(reference.rows());
  if (n == 0) throw InvalidArgumentError("knn: empty reference set");
  if (k > n) throw InvalidArgumentError("knn: k exceeds reference size");
  if (!query.allFinite() || !reference.allFinite())
    throw InvalidArgumentError("knn: non-finite coordinates");

  IndexMatrix out(m, k);
  std::vector<std::pair<double, int>> dists(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) dists[j] = {sq_dist3(query.row(i), reference.row(j)), j};
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
    for (int j = 0; j < k; ++j) out(i, j) = dists[j].second;
  }
  return out;
}

IndexMatrix knn(const Points& query, const Points& reference, int k) {
  if (reference.rows() <= kBruteForceLimit) return knn_brute_force(query, reference, k);
  if (!query.allFinite()) throw InvalidArgumentError("knn: non-finite coordinates");
  KdTree3 tree(reference);
  IndexMatrix out(query.rows(), k);
  std::vector<int> row;
  for (int i = 0; i < query.rows(); ++i) {
    tree.knn(query.row(i), k, row);
    for (int j = 0; j < k; ++j) out(i, j) = row[j];
  }
  return out;
}

}  // namespace pose6d
