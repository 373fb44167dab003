#pragma once

#include <string>

#include "pose6d/synth/scene.hpp"

namespace pose6d {

/// Writes one scene as a directory:
///   frame.ppm        rendered color
///   depth.raw        depth in the raw float format
///   annotation.json  intrinsics + per-instance poses/visibility
///   semantic.pgm     class id per pixel (0 = background)
///   instance.pgm     instance id per pixel, stored shifted by +1 (0 = none)
///   classes.json     per-class object id, symmetry, diameter, keypoint model
///   models/class<k>.ply   evaluation surface points per class
/// The vote field is derived data and is not stored; consumers resample it
/// from the frame + annotation.
void save_scene_bundle(const SceneBundle& bundle, const std::string& dir);

/// Inverse of save_scene_bundle. The returned bundle's `votes` field is left
/// empty. Color and depth go through their formats' 8-bit / float32
/// quantization; everything else is exact.
SceneBundle load_scene_bundle(const std::string& dir);

}  // namespace pose6d
