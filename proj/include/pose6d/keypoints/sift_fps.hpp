#pragma once

#include <optional>

#include "pose6d/core/types.hpp"
#include "pose6d/keypoints/dog.hpp"
#include "pose6d/keypoints/keypoint_model.hpp"
#include "pose6d/synth/objects.hpp"

namespace pose6d {

struct SiftFpsParams {
  int views = 60;
  int render_width = 320;
  int render_height = 240;
  double focal = 280.0;            // fx = fy, principal point at image center
  double camera_radius_scale = 2.5;  // camera distance = scale * diameter
  DogParams detector;
  double dedupe_radius = 1e-4;  // meters, candidate merge distance
  /// FPS seed: nullopt -> farthest-from-centroid candidate (deterministic),
  /// otherwise a uniformly drawn candidate from Rng(*seed).
  std::optional<uint64_t> seed;
};

/// Texture-saliency keypoint selection: render the object from sphere-sampled
/// viewpoints, detect DoG keypoints per view, lift them through the rendered
/// depth, map them back to the object frame, merge near-duplicates, then run
/// FPS over the merged candidates. Throws InsufficientSaliencyError (carrying
/// the candidate count) when fewer than n_keypoints candidates survive.
KeypointModel sift_fps_select(const ProceduralObject& object, int n_keypoints,
                              const SiftFpsParams& params = {});

/// Plain FPS over the object's surface samples (no saliency gating).
KeypointModel fps_select(const ProceduralObject& object, int n_keypoints,
                         std::optional<uint64_t> seed = std::nullopt);

}  // namespace pose6d
