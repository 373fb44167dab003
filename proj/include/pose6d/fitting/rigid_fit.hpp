#pragma once

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Paired 3D keypoints: model_pts in the object frame, camera_pts observed in
/// the camera frame. Optional non-negative weights (empty = uniform).
struct Correspondences {
  Points model_pts;
  Points camera_pts;
  VecX weights;

  int size() const { return static_cast<int>(model_pts.rows()); }
  bool has_weights() const { return weights.size() == model_pts.rows() && weights.size() > 0; }
};

/// Recover the rigid motion minimizing sum_i w_i ||camera_i - (R model_i + T)||^2.
///
/// Centroid subtraction, 3x3 cross-covariance, two-sided Jacobi SVD, and the
/// det-based reflection fix diag(1, 1, det(V U^T)) guarantee a proper rotation
/// even for planar configurations whose naive reconstruction mirrors.
///
/// Throws InsufficientCorrespondencesError for N < 3 and
/// DegenerateConfigurationError when the cross-covariance has rank < 2
/// (collinear or coincident points).
RigidTransform fit_pose(const Correspondences& corr);

/// sqrt(sum_i w_i ||camera_i - (R model_i + T)||^2 / sum_i w_i),
/// the objective value of the fit as an RMS residual in meters.
double residual_rmse(const Correspondences& corr, const RigidTransform& pose);

}  // namespace pose6d
