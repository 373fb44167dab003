#pragma once

#include <string>
#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// One evaluated pose: the distance is ADD for asymmetric objects and ADD-S
/// for symmetric ones (the ADD(S) dispatch happens when the record is built).
struct EvalRecord {
  std::string object_id;
  bool symmetric = false;
  double distance = 0.0;  // meters
  double diameter = 0.0;  // meters
};

/// Mean per-vertex distance between the model under the predicted and the
/// ground-truth pose.
double add(const PointCloud& model, const RigidTransform& pred, const RigidTransform& gt);

/// Closest-point variant for symmetric objects: each predicted-pose vertex is
/// matched to its nearest ground-truth-pose vertex. Exact nested min; a
/// kd-tree accelerates models above 4096 vertices without changing the result.
double add_s(const PointCloud& model, const RigidTransform& pred, const RigidTransform& gt);

/// ADD-S when symmetric, ADD otherwise.
double add_dispatch(const PointCloud& model, const RigidTransform& pred, const RigidTransform& gt,
                    bool symmetric);

/// Area under accuracy(t) = fraction of distances <= t for t in
/// [0, max_threshold], normalized by max_threshold. Evaluated in closed form
/// from the step function: sum_i max(0, T - d_i) / (n T). No grid sampling.
double add_auc(const std::vector<double>& distances, double max_threshold = 0.1);

/// Fraction of distances <= threshold.
double accuracy_at_threshold(const std::vector<double>& distances, double threshold);

/// Fraction of records with distance strictly below `factor` times the object
/// diameter (ADD-0.1d for the default factor).
double add_01d(const std::vector<EvalRecord>& records, double factor = 0.1);

}  // namespace pose6d
