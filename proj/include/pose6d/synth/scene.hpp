#pragma once

#include <map>
#include <string>
#include <vector>

#include "pose6d/keypoints/keypoint_model.hpp"
#include "pose6d/synth/render.hpp"
#include "pose6d/voting/detect.hpp"

namespace pose6d {

struct SceneSpec {
  CameraIntrinsics intrinsics;            // default 320x240, f = 280
  std::vector<ProceduralObject> objects;  // semantic class of object i is i+1
  std::map<int, KeypointModel> models;    // per class; empty -> plain FPS n=8
  int min_instances = 2;
  int max_instances = 3;
  double min_z = 0.45, max_z = 0.70;      // instance depth range, meters
  double lateral_x = 0.15, lateral_y = 0.10;
  double min_separation = 0.06;           // any two instance centers
  double same_class_separation = 0.18;    // keeps center modes well apart
  double backdrop_distance = 0.9;
  int vote_points = 4096;                 // vote field subsample size
};

/// Everything the pipeline needs to know about one semantic class.
struct ClassModel {
  std::string object_id;
  bool symmetric = false;
  Points points;           // subsampled surface, for ADD evaluation
  KeypointModel keypoints;
};

struct SceneBundle {
  RgbdFrame frame;
  SceneAnnotation annotation;
  VoteField votes;  // ground-truth field (exact offsets)
  std::map<int, ClassModel> classes;
};

/// Four desk objects (box, cylinder, sphere, l-bracket) under the default
/// camera; keypoint models derived on demand.
SceneSpec default_scene_spec();

/// Deterministic scene draw: place 2-3 instances with rejection sampling for
/// the separation constraints, render, and derive the exact ground-truth
/// vote field. Retries the layout a bounded number of times when an instance
/// ends up (almost) invisible; throws InvalidArgumentError if placement keeps
/// failing.
SceneBundle make_scene(const SceneSpec& spec, uint64_t seed);

/// Exact labels and offsets at the given valid-pixel flat indices (row-major
/// v * width + u). Every offset satisfies point + offset = posed target.
VoteField ground_truth_votes(const RgbdFrame& frame,
                             const SceneAnnotation& annotation,
                             const std::map<int, KeypointModel>& models,
                             const std::vector<int>& flat_indices);

/// Add seeded Gaussian noise to all offsets and replace round(frac * N) rows
/// with uniform offsets in the ±1 m cube.
VoteField corrupt_votes(const VoteField& votes, double gaussian_sigma,
                        double outlier_frac, uint64_t seed);

}  // namespace pose6d
