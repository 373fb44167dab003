#include "pose6d/fitting/rigid_fit.hpp"

#include <Eigen/SVD>

namespace pose6d {

namespace {

void check_inputs(const Correspondences& corr) {
  if (corr.model_pts.rows() != corr.camera_pts.rows())
    throw InvalidArgumentError("fit_pose: model/camera point counts differ");
  if (corr.size() < 3)
    throw InsufficientCorrespondencesError("fit_pose: need at least 3 correspondences, got " +
                                           std::to_string(corr.size()));
  if (corr.weights.size() != 0 && corr.weights.size() != corr.model_pts.rows())
    throw InvalidArgumentError("fit_pose: weight count does not match point count");
  if (corr.has_weights()) {
    if ((corr.weights.array() < 0.0).any())
      throw InvalidArgumentError("fit_pose: negative weight");
    if (!(corr.weights.sum() > 0.0))
      throw InvalidArgumentError("fit_pose: weights sum to zero");
  }
}

}  // namespace

RigidTransform fit_pose(const Correspondences& corr) {
  check_inputs(corr);
  const int n = corr.size();
  VecX w = corr.has_weights() ? corr.weights : VecX::Ones(n);
  const double w_sum = w.sum();

  const Eigen::RowVector3d centroid_model = (w.transpose() * corr.model_pts) / w_sum;
  const Eigen::RowVector3d centroid_camera = (w.transpose() * corr.camera_pts) / w_sum;

  Mat3 cross = Mat3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 a = (corr.model_pts.row(i) - centroid_model).transpose();
    const Vec3 b = (corr.camera_pts.row(i) - centroid_camera).transpose();
    cross += w[i] * (a * b.transpose());
  }

  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[1] <= 1e-9 * sv[0])
    throw DegenerateConfigurationError(
        "fit_pose: cross-covariance rank < 2 (collinear or coincident points)");

  Mat3 rot = svd.matrixV() * svd.matrixU().transpose();
  if (rot.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    rot = svd.matrixV() * flip * svd.matrixU().transpose();
  }
  const Vec3 t = centroid_camera.transpose() - rot * centroid_model.transpose();
  return RigidTransform(rot, t);
}

double residual_rmse(const Correspondences& corr, const RigidTransform& pose) {
  if (corr.model_pts.rows() != corr.camera_pts.rows())
    throw InvalidArgumentError("residual_rmse: model/camera point counts differ");
  const int n = corr.size();
  if (n == 0) return 0.0;
  VecX w = corr.has_weights() ? corr.weights : VecX::Ones(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 pred = pose.apply(corr.model_pts.row(i).transpose());
    acc += w[i] * (corr.camera_pts.row(i).transpose() - pred).squaredNorm();
  }
  return std::sqrt(acc / w.sum());
}

}  // namespace pose6d
