#include "pose6d/voting/detect.hpp"

#include <algorithm>
#include <set>

#include "pose6d/core/error.hpp"
#include "pose6d/fitting/rigid_fit.hpp"
#include "pose6d/voting/mean_shift.hpp"

namespace pose6d {

void VoteField::validate() const {
  const int n = size();
  if (!points.allFinite()) throw InvalidArgumentError("vote field: non-finite points");
  if (semantic.size() != n) throw InvalidArgumentError("vote field: semantic size mismatch");
  if (center_offset.rows() != n)
    throw InvalidArgumentError("vote field: center offset size mismatch");
  if ((semantic.array() < 0).any())
    throw InvalidArgumentError("vote field: negative class label");
  for (const Points& off : keypoint_offsets) {
    if (off.rows() != n)
      throw InvalidArgumentError("vote field: keypoint offset size mismatch");
  }
}

std::vector<Detection> segment_instances(const VoteField& votes,
                                         const VotingParams& params) {
  votes.validate();
  std::set<int> classes;
  for (int i = 0; i < votes.size(); ++i) {
    if (votes.semantic[i] > 0) classes.insert(votes.semantic[i]);
  }
  std::vector<Detection> detections;
  for (int cls : classes) {
    std::vector<int> rows;
    for (int i = 0; i < votes.size(); ++i) {
      if (votes.semantic[i] == cls) rows.push_back(i);
    }
    Points voted(static_cast<int>(rows.size()), 3);
    for (int i = 0; i < voted.rows(); ++i) {
      voted.row(i) = votes.points.row(rows[i]) + votes.center_offset.row(rows[i]);
    }
    const MeanShiftResult ms =
        mean_shift(voted, params.center_bandwidth, params.tol, params.max_iter);
    for (int mode = 0; mode < ms.modes.rows(); ++mode) {
      if (ms.support[mode] < params.min_cluster_size) continue;
      Detection det;
      det.class_id = cls;
      det.voted_center = ms.modes.row(mode).transpose();
      for (int i = 0; i < voted.rows(); ++i) {
        if (ms.assignment[i] == mode) det.member_indices.push_back(rows[i]);
      }
      detections.push_back(std::move(det));
    }
  }
  return detections;
}

void vote_keypoints(Detection& det, const VoteField& votes,
                    const VotingParams& params) {
  if (det.member_indices.empty()) {
    throw InvalidArgumentError("vote_keypoints: detection has no members");
  }
  const int k = votes.keypoint_count();
  det.voted_keypoints.resize(k, 3);
  det.keypoint_support.resize(k);
  for (int ki = 0; ki < k; ++ki) {
    Points ballots(static_cast<int>(det.member_indices.size()), 3);
    for (int i = 0; i < ballots.rows(); ++i) {
      const int row = det.member_indices[i];
      ballots.row(i) = votes.points.row(row) + votes.keypoint_offsets[ki].row(row);
    }
    const MeanShiftResult ms =
        mean_shift(ballots, params.keypoint_bandwidth, params.tol, params.max_iter);
    int best = 0;
    for (int mode = 1; mode < ms.modes.rows(); ++mode) {
      if (ms.support[mode] > ms.support[best]) best = mode;
    }
    det.voted_keypoints.row(ki) = ms.modes.row(best);
    det.keypoint_support[ki] = ms.support[best];
  }
}

std::vector<Detection> detect_and_fit(const VoteField& votes,
                                      const std::map<int, KeypointModel>& models,
                                      const VotingParams& params) {
  votes.validate();
  for (int i = 0; i < votes.size(); ++i) {
    if (votes.semantic[i] > 0 && models.find(votes.semantic[i]) == models.end()) {
      throw ConfigError("detect_and_fit: no keypoint model for class " +
                        std::to_string(votes.semantic[i]));
    }
  }
  std::vector<Detection> detections = segment_instances(votes, params);
  for (Detection& det : detections) {
    vote_keypoints(det, votes, params);
    const KeypointModel& model = models.at(det.class_id);
    if (model.count() != votes.keypoint_count()) {
      throw ConfigError("detect_and_fit: keypoint count mismatch for class " +
                        std::to_string(det.class_id));
    }
    Correspondences corr;
    corr.model_pts = model.keypoints;
    corr.camera_pts = det.voted_keypoints;
    if (params.weight_by_support) corr.weights = det.keypoint_support;
    det.pose = fit_pose(corr);
  }
  return detections;
}

}  // namespace pose6d
