#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

#include "pose6d/keypoints/keypoint_model.hpp"
#include "pose6d/net/fusion.hpp"
#include "pose6d/net/params.hpp"
#include "pose6d/synth/render.hpp"
#include "pose6d/voting/detect.hpp"

namespace pose6d {

/// Ordered so writers emit stable key order (deterministic bytes).
using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Parse, turning nlohmann's exceptions into ParseError.
Json parse_json(const std::string& text);
std::string dump_json(const Json& j);

/// Rotation as 9 row-major entries + 3 translation entries. Readers rebuild
/// through RigidTransform, so a non-orthonormal or reflected rotation is
/// rejected at load time.
Json pose_to_json(const RigidTransform& pose);
RigidTransform pose_from_json(const Json& j);
std::string write_pose_json(const RigidTransform& pose);
RigidTransform read_pose_json(const std::string& text);

/// One estimated pose tagged with its scene and class for evaluation.
struct PoseRecord {
  int scene = 0;
  int class_id = 0;
  std::string object_id;
  RigidTransform pose;
};

std::string write_poses_json(const std::vector<PoseRecord>& poses);
std::vector<PoseRecord> read_poses_json(const std::string& text);

Json keypoint_model_to_json(const KeypointModel& model);
KeypointModel keypoint_model_from_json(const Json& j);
std::string write_keypoint_model_json(const KeypointModel& model);
KeypointModel read_keypoint_model_json(const std::string& text);

std::string write_detections_json(const std::vector<Detection>& detections);
std::vector<Detection> read_detections_json(const std::string& text);

Json fusion_config_to_json(const FusionConfig& cfg);
/// Missing keys fall back to defaults; the result is validated.
FusionConfig fusion_config_from_json(const Json& j);
std::string write_fusion_config_json(const FusionConfig& cfg);
FusionConfig read_fusion_config_json(const std::string& text);

std::string write_params_json(const ParamStore& params);
ParamStore read_params_json(const std::string& text);

Json annotation_to_json(const SceneAnnotation& annotation,
                        const CameraIntrinsics& intrinsics);
/// Restores intrinsics and instance records; the id maps travel separately
/// as PGMs.
void annotation_from_json(const Json& j, SceneAnnotation& annotation,
                          CameraIntrinsics& intrinsics);

}  // namespace pose6d
