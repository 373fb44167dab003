#include "pose6d/core/camera.hpp"

namespace pose6d {

XyzMap lift_depth(const RgbdFrame& frame) {
  frame.validate();
  const int h = frame.height(), w = frame.width();
  const auto& intr = frame.intrinsics;

  XyzMap map;
  map.x = ImagePlane::Zero(h, w);
  map.y = ImagePlane::Zero(h, w);
  map.z = ImagePlane::Zero(h, w);
  map.valid = MaskPlane::Constant(h, w, false);

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double d = frame.depth(v, u);
      if (d <= 0.0) continue;
      map.x(v, u) = (u - intr.cx) * d / intr.fx;
      map.y(v, u) = (v - intr.cy) * d / intr.fy;
      map.z(v, u) = d;
      map.valid(v, u) = true;
    }
  }
  return map;
}

std::optional<PixelCoord> project(const Vec3& point, const CameraIntrinsics& intr) {
  if (!(point.z() > 0.0))
    throw BehindCameraError("cannot project point with z = " + std::to_string(point.z()));
  PixelCoord px;
  px.u = intr.fx * point.x() / point.z() + intr.cx;
  px.v = intr.fy * point.y() / point.z() + intr.cy;
  if (px.u < 0.0 || px.u >= intr.width || px.v < 0.0 || px.v >= intr.height) return std::nullopt;
  return px;
}

Points apply_transform(const RigidTransform& pose, const Points& pts) {
  Points out(pts.rows(), 3);
  out = pts * pose.rotation().transpose();
  out.rowwise() += pose.translation().transpose();
  return out;
}

PointCloud apply_transform(const RigidTransform& pose, const PointCloud& cloud) {
  PointCloud out;
  out.points = apply_transform(pose, cloud.points);
  out.colors = cloud.colors;
  if (cloud.has_normals()) out.normals = cloud.normals * pose.rotation().transpose();
  return out;
}

}  // namespace pose6d
