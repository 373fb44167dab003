#include "pose6d/metrics/metrics.hpp"

#include "pose6d/core/camera.hpp"
#include "pose6d/core/knn.hpp"

namespace pose6d {

double add(const PointCloud& model, const RigidTransform& pred, const RigidTransform& gt) {
  const int m = model.size();
  if (m == 0) throw InvalidArgumentError("add: empty model");
  const Points a = apply_transform(pred, model.points);
  const Points b = apply_transform(gt, model.points);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += (a.row(i) - b.row(i)).norm();
  return acc / m;
}

double add_s(const PointCloud& model, const RigidTransform& pred, const RigidTransform& gt) {
  const int m = model.size();
  if (m == 0) throw InvalidArgumentError("add_s: empty model");
  const Points a = apply_transform(pred, model.points);
  const Points b = apply_transform(gt, model.points);

  double acc = 0.0;
  if (m <= 4096) {
    for (int i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) best = std::min(best, sq_dist3(a.row(i), b.row(j)));
      acc += std::sqrt(best);
    }
  } else {
    KdTree3 tree(b);
    std::vector<int> nn;
    for (int i = 0; i < m; ++i) {
      tree.knn(a.row(i), 1, nn);
      acc += std::sqrt(sq_dist3(a.row(i), b.row(nn[0])));
    }
  }
  return acc / m;
}

double add_dispatch(const PointCloud& model, const RigidTransform& pred, const RigidTransform& gt,
                    bool symmetric) {
  return symmetric ? add_s(model, pred, gt) : add(model, pred, gt);
}

double add_auc(const std::vector<double>& distances, double max_threshold) {
  if (distances.empty()) throw InvalidArgumentError("add_auc: empty distance list");
  if (!(max_threshold > 0.0)) throw InvalidArgumentError("add_auc: max_threshold must be > 0");
  double acc = 0.0;
  for (double d : distances) acc += std::max(0.0, max_threshold - d);
  return acc / (static_cast<double>(distances.size()) * max_threshold);
}

double accuracy_at_threshold(const std::vector<double>& distances, double threshold) {
  if (distances.empty()) throw InvalidArgumentError("accuracy_at_threshold: empty distance list");
  if (threshold < 0.0) throw InvalidArgumentError("accuracy_at_threshold: negative threshold");
  int hits = 0;
  for (double d : distances)
    if (d <= threshold) ++hits;
  return static_cast<double>(hits) / static_cast<double>(distances.size());
}

double add_01d(const std::vector<EvalRecord>& records, double factor) {
  if (records.empty()) throw InvalidArgumentError("add_01d: empty record list");
  int hits = 0;
  for (const auto& rec : records) {
    if (!(rec.diameter > 0.0)) throw InvalidArgumentError("add_01d: non-positive diameter");
    // Strict inequality at the boundary.
    if (rec.distance < factor * rec.diameter) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace pose6d
