#include "pose6d/keypoints/viewpoints.hpp"

#include <cmath>

#include "pose6d/core/error.hpp"

namespace pose6d {

Points sphere_viewpoints(int count, double radius) {
  if (count < 1) {
    throw InvalidArgumentError("sphere_viewpoints: count must be positive");
  }
  if (!(radius > 0.0)) {
    throw InvalidArgumentError("sphere_viewpoints: radius must be positive");
  }
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  Points out(count, 3);
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * i / std::max(count - 1, 1);
    const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double azimuth = golden_angle * i;
    out(i, 0) = radius * ring * std::cos(azimuth);
    out(i, 1) = radius * ring * std::sin(azimuth);
    out(i, 2) = radius * z;
  }
  return out;
}

RigidTransform look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 offset = target - eye;
  const double dist = offset.norm();
  if (!(dist > 1e-12)) {
    throw InvalidArgumentError("look_at: eye and target coincide");
  }
  const Vec3 forward = offset / dist;

  Vec3 hint(0.0, 1.0, 0.0);
  Vec3 down_raw = hint.dot(forward) * forward - hint;
  if (down_raw.norm() < 1e-6) {
    hint = Vec3(0.0, 0.0, 1.0);
    down_raw = hint.dot(forward) * forward - hint;
  }
  const Vec3 down = down_raw.normalized();
  const Vec3 right = down.cross(forward);

  Mat3 rot;
  rot.row(0) = right.transpose();
  rot.row(1) = down.transpose();
  rot.row(2) = forward.transpose();
  return RigidTransform(rot, -rot * eye);
}

std::vector<RigidTransform> look_at_origin(const Points& viewpoints) {
  std::vector<RigidTransform> poses;
  poses.reserve(viewpoints.rows());
  for (int i = 0; i < viewpoints.rows(); ++i) {
    poses.push_back(look_at(viewpoints.row(i).transpose(), Vec3::Zero()));
  }
  return poses;
}

}  // namespace pose6d
