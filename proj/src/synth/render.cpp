#include "pose6d/synth/render.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "pose6d/core/error.hpp"

namespace pose6d {

const InstanceInfo& SceneAnnotation::info_for(int instance_id) const {
  for (const InstanceInfo& info : instances) {
    if (info.instance_id == instance_id) return info;
  }
  throw InvalidArgumentError("annotation has no instance " + std::to_string(instance_id));
}

RenderResult splat_render(const std::vector<ProceduralObject>& objects,
                          const std::vector<RenderInstance>& instances,
                          const CameraIntrinsics& intr,
                          const RenderOptions& options) {
  intr.validate();
  if (instances.empty()) {
    throw InvalidArgumentError("splat_render: empty scene");
  }
  std::set<int> seen_ids;
  for (const RenderInstance& inst : instances) {
    if (inst.object_index < 0 || inst.object_index >= static_cast<int>(objects.size()))
      throw InvalidArgumentError("splat_render: object index out of range");
    if (inst.class_id < 0)
      throw InvalidArgumentError("splat_render: negative class id");
    if (!seen_ids.insert(inst.instance_id).second)
      throw InvalidArgumentError("splat_render: duplicate instance id");
  }

  const int h = intr.height, w = intr.width;
  RenderResult out;
  out.frame.red = ImagePlane::Constant(h, w, options.background);
  out.frame.green = ImagePlane::Constant(h, w, options.background);
  out.frame.blue = ImagePlane::Constant(h, w, options.background);
  out.frame.depth = ImagePlane::Zero(h, w);
  out.frame.intrinsics = intr;
  out.annotation.semantic = IndexMatrix::Zero(h, w);
  out.annotation.instance = IndexMatrix::Constant(h, w, -1);

  ImagePlane zbuf = ImagePlane::Constant(h, w, std::numeric_limits<double>::infinity());
  IndexMatrix winner = IndexMatrix::Constant(h, w, -1);  // index into `instances`

  for (int ii = 0; ii < static_cast<int>(instances.size()); ++ii) {
    const RenderInstance& inst = instances[ii];
    const ProceduralObject& obj = objects[inst.object_index];
    const Points cam = apply_transform(inst.pose, obj.surface.points);
    for (int s = 0; s < cam.rows(); ++s) {
      const double z = cam(s, 2);
      if (z <= 0.0) {
        throw BehindCameraError("splat_render: sample at or behind the camera plane");
      }
      const long u = std::lround(intr.fx * cam(s, 0) / z + intr.cx);
      const long v = std::lround(intr.fy * cam(s, 1) / z + intr.cy);
      if (u < 0 || u >= w || v < 0 || v >= h) continue;
      if (z < zbuf(v, u)) {
        zbuf(v, u) = z;
        winner(v, u) = ii;
        out.frame.depth(v, u) = z;
        const double tone_r = obj.surface.colors(s, 0);
        const double tone_g = obj.surface.colors(s, 1);
        const double tone_b = obj.surface.colors(s, 2);
        out.frame.red(v, u) = tone_r;
        out.frame.green(v, u) = tone_g;
        out.frame.blue(v, u) = tone_b;
        out.annotation.semantic(v, u) = inst.class_id;
        out.annotation.instance(v, u) = inst.instance_id;
      }
    }
  }

  std::vector<long> won(instances.size(), 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (winner(v, u) >= 0) ++won[winner(v, u)];

  for (int ii = 0; ii < static_cast<int>(instances.size()); ++ii) {
    const RenderInstance& inst = instances[ii];
    InstanceInfo info;
    info.instance_id = inst.instance_id;
    info.class_id = inst.class_id;
    info.object_index = inst.object_index;
    info.object_id = objects[inst.object_index].object_id;
    info.pose = inst.pose;
    info.visibility =
        static_cast<double>(won[ii]) / objects[inst.object_index].surface.size();
    out.annotation.instances.push_back(info);
  }
  return out;
}

}  // namespace pose6d
