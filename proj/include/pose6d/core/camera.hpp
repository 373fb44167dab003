#pragma once

#include <optional>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// Continuous pixel location. Integer coordinates are pixel centers, so
/// project(lift(u, v)) returns (u, v) exactly for valid depth.
struct PixelCoord {
  double u = 0, v = 0;
};

/// Lift every valid-depth pixel to camera-frame 3D:
///   x = (u - cx) d / fx,  y = (v - cy) d / fy,  z = d.
/// Zero depth marks the pixel invalid in the output mask.
XyzMap lift_depth(const RgbdFrame& frame);

/// Pinhole projection u = fx x / z + cx, v = fy y / z + cy.
/// Returns nullopt when (u, v) falls outside [0,width) x [0,height).
/// Throws BehindCameraError for z <= 0.
std::optional<PixelCoord> project(const Vec3& point, const CameraIntrinsics& intr);

/// Rigidly move a cloud: points -> R p + T, normals rotated only,
/// colors carried through.
PointCloud apply_transform(const RigidTransform& pose, const PointCloud& cloud);

/// Points-only overload.
Points apply_transform(const RigidTransform& pose, const Points& pts);

}  // namespace pose6d
