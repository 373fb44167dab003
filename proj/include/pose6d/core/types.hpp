#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pose6d/core/error.hpp"

namespace pose6d {

inline constexpr double kPi = 3.14159265358979323846;

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
/// N x 3 row-per-point matrix, the working currency of every geometry op.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using VecX = Eigen::VectorXd;
/// H x W scalar image plane (rows = v, cols = u).
using ImagePlane = Eigen::ArrayXXd;
using MaskPlane = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Pinhole camera parameters in pixels.
struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
      throw InvalidArgumentError("intrinsics: focal lengths must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
      throw InvalidArgumentError("intrinsics: principal point outside image");
  }
};

/// Proper rigid motion p -> r * p + t. The constructor enforces SO(3)
/// membership: r^T r = I within 1e-9 elementwise and det(r) = +1 within 1e-9.
class RigidTransform {
 public:
  static constexpr double kOrthoTol = 1e-9;

  RigidTransform() : r_(Mat3::Identity()), t_(Vec3::Zero()) {}

  RigidTransform(const Mat3& r, const Vec3& t) : r_(r), t_(t) {
    const Mat3 gram = r.transpose() * r;
    if (((gram - Mat3::Identity()).array().abs() > kOrthoTol).any())
      throw InvalidArgumentError("rotation is not orthonormal within 1e-9");
    if (std::abs(r.determinant() - 1.0) > kOrthoTol)
      throw InvalidArgumentError("rotation determinant differs from +1 by more than 1e-9");
  }

  static RigidTransform identity() { return RigidTransform(); }

  const Mat3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }

  Vec3 apply(const Vec3& p) const { return r_ * p + t_; }

  RigidTransform inverse() const {
    RigidTransform out;
    out.r_ = r_.transpose();
    out.t_ = -(r_.transpose() * t_);
    return out;
  }

  /// Composition: (*this) after other, i.e. apply(other.apply(p)).
  RigidTransform compose(const RigidTransform& other) const {
    RigidTransform out;
    out.r_ = r_ * other.r_;
    out.t_ = r_ * other.t_ + t_;
    return out;
  }

 private:
  Mat3 r_;
  Vec3 t_;
};

/// Angle of the relative rotation between two transforms, radians.
/// atan2 of the axial (sine) and trace (cosine) parts, which stays accurate
/// near 0 and pi where the plain acos form loses up to 8 digits.
inline double rotation_angle_between(const Mat3& a, const Mat3& b) {
  const Mat3 r = a.transpose() * b;
  const Vec3 axial(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * axial.norm(), 0.5 * (r.trace() - 1.0));
}

/// Point set with optional per-point colors ([0,1]) and unit normals.
/// Empty matrices (0 rows) mean "attribute absent".
struct PointCloud {
  Points points;
  Points colors;
  Points normals;

  int size() const { return static_cast<int>(points.rows()); }
  bool has_colors() const { return colors.rows() == points.rows() && points.rows() > 0; }
  bool has_normals() const { return normals.rows() == points.rows() && points.rows() > 0; }

  void validate() const {
    if (!points.allFinite()) throw InvalidArgumentError("point cloud has non-finite coordinates");
    if (colors.rows() != 0 && colors.rows() != points.rows())
      throw InvalidArgumentError("color count does not match point count");
    if (normals.rows() != 0 && normals.rows() != points.rows())
      throw InvalidArgumentError("normal count does not match point count");
    if (has_normals()) {
      for (int i = 0; i < normals.rows(); ++i) {
        if (std::abs(normals.row(i).norm() - 1.0) > 1e-6)
          throw InvalidArgumentError("normal " + std::to_string(i) + " is not unit length");
      }
    }
  }
};

/// Aligned color + depth observation. Depth in meters, 0 marks invalid pixels.
struct RgbdFrame {
  ImagePlane red, green, blue;  // each H x W in [0,1]
  ImagePlane depth;             // H x W, meters
  CameraIntrinsics intrinsics;

  int height() const { return static_cast<int>(depth.rows()); }
  int width() const { return static_cast<int>(depth.cols()); }

  void validate() const {
    intrinsics.validate();
    const auto h = depth.rows(), w = depth.cols();
    if (red.rows() != h || red.cols() != w || green.rows() != h || green.cols() != w ||
        blue.rows() != h || blue.cols() != w)
      throw InvalidArgumentError("rgb and depth shapes differ");
    if (!depth.isFinite().all() || (depth < 0.0).any())
      throw InvalidArgumentError("depth must be finite and non-negative");
    if (h != intrinsics.height || w != intrinsics.width)
      throw InvalidArgumentError("image size does not match intrinsics");
  }

  /// Luminance used for keypoint detection: plain channel mean.
  ImagePlane grayscale() const { return (red + green + blue) / 3.0; }
};

/// Per-pixel lifted 3D coordinates, aligned with the source image.
/// Pixels with `valid == false` carry no geometry and are skipped by all
/// neighbor queries.
struct XyzMap {
  ImagePlane x, y, z;
  MaskPlane valid;

  int height() const { return static_cast<int>(valid.rows()); }
  int width() const { return static_cast<int>(valid.cols()); }

  Vec3 at(int v, int u) const { return {x(v, u), y(v, u), z(v, u)}; }

  /// Row-major list of valid pixels as (flat_index, xyz) pairs.
  void collect_valid(std::vector<int>& flat_indices, Points& coords) const {
    const int h = height(), w = width();
    flat_indices.clear();
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (valid(v, u)) flat_indices.push_back(v * w + u);
    coords.resize(static_cast<int>(flat_indices.size()), 3);
    for (int i = 0; i < coords.rows(); ++i) {
      const int v = flat_indices[i] / w, u = flat_indices[i] % w;
      coords.row(i) << x(v, u), y(v, u), z(v, u);
    }
  }
};

}  // namespace pose6d
