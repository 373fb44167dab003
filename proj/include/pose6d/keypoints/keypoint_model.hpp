#pragma once

#include <string>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// The N selected 3D keypoints of one object, in the object frame, together
/// with the centroid and diameter used by voting and evaluation.
struct KeypointModel {
  std::string object_id;
  Points keypoints;  // N x 3
  Vec3 center = Vec3::Zero();
  double diameter = 0.0;

  int count() const { return static_cast<int>(keypoints.rows()); }

  void validate() const {
    if (keypoints.rows() < 1)
      throw InvalidArgumentError("keypoint model is empty");
    if (!keypoints.allFinite())
      throw InvalidArgumentError("keypoint model has non-finite entries");
    if (!(diameter > 0.0))
      throw InvalidArgumentError("keypoint model diameter must be positive");
    for (int i = 0; i < keypoints.rows(); ++i)
      for (int j = i + 1; j < keypoints.rows(); ++j)
        if ((keypoints.row(i) - keypoints.row(j)).norm() == 0.0)
          throw InvalidArgumentError("keypoint model has coincident keypoints");
  }
};

}  // namespace pose6d
