#pragma once

#include <string>
#include <vector>

#include "pose6d/core/camera.hpp"
#include "pose6d/core/types.hpp"
#include "pose6d/synth/objects.hpp"

namespace pose6d {

/// One posed object occurrence in a scene. class_id 0 is reserved for the
/// background / backdrop; instance ids must be unique within the scene.
struct RenderInstance {
  int object_index = 0;  // into the objects vector handed to splat_render
  int class_id = 0;
  int instance_id = 0;
  RigidTransform pose;  // camera-from-object
};

struct RenderOptions {
  double background = 0.0;  // gray value of pixels no sample reaches
};

struct InstanceInfo {
  int instance_id = 0;
  int class_id = 0;
  int object_index = 0;
  std::string object_id;
  RigidTransform pose;
  double visibility = 0.0;  // winning samples / total samples
};

/// Pixel-aligned ground truth produced alongside the rendered frame.
struct SceneAnnotation {
  IndexMatrix semantic;  // H x W class ids, 0 where nothing renders
  IndexMatrix instance;  // H x W instance ids, -1 where nothing renders
  std::vector<InstanceInfo> instances;

  const InstanceInfo& info_for(int instance_id) const;
};

struct RenderResult {
  RgbdFrame frame;
  SceneAnnotation annotation;
};

/// Z-buffered point splatting: every surface sample is projected and the
/// nearest sample wins its pixel; depth is the winner's z and rgb the
/// winner's baked texture. Throws if the instance list is empty or any
/// sample lands at or behind the camera plane.
RenderResult splat_render(const std::vector<ProceduralObject>& objects,
                          const std::vector<RenderInstance>& instances,
                          const CameraIntrinsics& intr,
                          const RenderOptions& options = {});

}  // namespace pose6d
