#pragma once

#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

/// V camera positions spread over a sphere of the given radius centred on the
/// origin, using the Fibonacci spiral lattice: z_i = 1 - 2i / max(V-1, 1),
/// azimuth_i = i * golden_angle. V = 1 yields the single point (0, 0, radius).
Points sphere_viewpoints(int count, double radius);

/// Camera-from-object transform for a camera at `eye` (object frame) looking
/// at `target`. Camera axes follow the projection convention used elsewhere:
/// +z forward (toward the scene), +x right, +y down. The camera y axis is
/// chosen so that the object's +y appears up in the image; when the view
/// direction is within 1e-6 of parallel to +y the hint falls back to +z.
RigidTransform look_at(const Vec3& eye, const Vec3& target);

/// look_at for every viewpoint row, all aimed at the origin.
std::vector<RigidTransform> look_at_origin(const Points& viewpoints);

}  // namespace pose6d
