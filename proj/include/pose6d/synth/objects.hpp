#pragma once

#include <string>
#include <vector>

#include "pose6d/core/types.hpp"

namespace pose6d {

enum class ShapeKind { kBox, kCylinder, kSphere, kLBracket, kPlane };

std::string shape_name(ShapeKind shape);

/// A bright Gaussian texture spot with an exactly known 3D center, the
/// ground-truth anchor for saliency-based keypoint selection.
struct BlobSpec {
  Vec3 center = Vec3::Zero();  // object frame, on the surface
  double sigma = 0.006;        // meters (3D falloff)
  double peak = 1.0;           // intensity blended toward at the center
};

/// How a surface is sampled and painted. `spacing` must stay below the pixel
/// footprint of the closest intended render distance so the splat renderer
/// leaves no holes.
struct SurfaceStyle {
  double spacing = 0.00075;  // meters between neighboring samples
  bool checker = true;
  double checker_cell = 0.02;
  double light = 0.65;
  double dark = 0.35;
  double flat_gray = 0.5;  // base tone when checker == false
  std::vector<BlobSpec> blobs;
};

/// Parametric shape with surface samples on the analytic surface (exact to
/// 1e-9), outward unit normals, and baked procedural texture.
struct ProceduralObject {
  std::string object_id;
  ShapeKind shape = ShapeKind::kBox;
  bool symmetric = false;  // feeds ADD vs ADD-S dispatch
  PointCloud surface;      // points + normals + colors, object frame
  std::vector<BlobSpec> blobs;
  Vec3 center = Vec3::Zero();  // centroid of the surface samples
  double diameter = 0.0;       // exact max pairwise surface distance
};

ProceduralObject make_box(const std::string& object_id, const Vec3& extents,
                          const SurfaceStyle& style = {});
ProceduralObject make_cylinder(const std::string& object_id, double radius,
                               double height, const SurfaceStyle& style = {});
ProceduralObject make_sphere(const std::string& object_id, double radius,
                             const SurfaceStyle& style = {});
/// Two fused slabs forming an L: leg_a along +x, leg_b along +z, both of the
/// given thickness, `width` deep along y. Asymmetric on purpose so ADD and
/// ADD-S genuinely diverge.
ProceduralObject make_l_bracket(const std::string& object_id, double leg_a,
                                double leg_b, double width, double thickness,
                                const SurfaceStyle& style = {});
/// Axis-aligned rectangle in the z=0 plane (normal +z), used as the scene
/// backdrop (semantic class 0).
ProceduralObject make_plane(const std::string& object_id, double width,
                            double height, const SurfaceStyle& style = {});

/// Flat mid-gray cube with 8 bright blobs inset on the +z and -z faces —
/// the saliency ground-truth object: its only texture extrema are the blobs.
ProceduralObject make_blob_cube(const std::string& object_id,
                                double edge = 0.08, double blob_sigma = 0.006);

}  // namespace pose6d
