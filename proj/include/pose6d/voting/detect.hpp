#pragma once

#include <map>
#include <optional>
#include <vector>

#include "pose6d/core/types.hpp"
#include "pose6d/keypoints/keypoint_model.hpp"

namespace pose6d {

/// Per-point votes: each labeled point carries predicted offsets to its
/// instance's center and to each of the K object keypoints. Class 0 is the
/// background and never votes.
struct VoteField {
  Points points;             // N x 3, camera frame
  Eigen::VectorXi semantic;  // N class labels, 0 = background
  Points center_offset;      // N x 3
  std::vector<Points> keypoint_offsets;  // K entries, each N x 3

  int size() const { return static_cast<int>(points.rows()); }
  int keypoint_count() const { return static_cast<int>(keypoint_offsets.size()); }
  void validate() const;
};

struct Detection {
  int class_id = 0;
  std::vector<int> member_indices;  // rows of the vote field
  Vec3 voted_center = Vec3::Zero();
  Points voted_keypoints;   // K x 3 once vote_keypoints has run
  VecX keypoint_support;    // votes behind each keypoint's winning mode
  std::optional<RigidTransform> pose;
};

struct VotingParams {
  double center_bandwidth = 0.04;    // meters
  double keypoint_bandwidth = 0.02;  // meters
  double tol = 1e-5;
  int max_iter = 100;
  int min_cluster_size = 10;
  /// Weight the pose fit by per-keypoint vote support instead of uniformly.
  bool weight_by_support = false;
};

/// Cluster voted centers (point + center_offset) per semantic class with
/// mean shift; every sufficiently supported mode founds a Detection holding
/// its assigned points.
std::vector<Detection> segment_instances(const VoteField& votes,
                                         const VotingParams& params = {});

/// Fill det.voted_keypoints: per keypoint, mean shift over the members'
/// keypoint votes; the mode with the most support wins (ties: lowest mode
/// index).
void vote_keypoints(Detection& det, const VoteField& votes,
                    const VotingParams& params = {});

/// segment_instances -> vote_keypoints -> fit_pose against the class's
/// KeypointModel. Throws ConfigError if any labeled class lacks a model.
std::vector<Detection> detect_and_fit(const VoteField& votes,
                                      const std::map<int, KeypointModel>& models,
                                      const VotingParams& params = {});

}  // namespace pose6d
